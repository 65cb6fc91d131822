#pragma once

// Gaussian-kernel Nadaraya-Watson regression, used to check whether return
// on assets is flat in log assets.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "shadowtail/dataset.hpp"

namespace shadowtail {

struct XYPoint {
    double x = 0.0;
    double y = 0.0;
};

struct RoaPoints {
    std::vector<XYPoint> points;  // x = log assets, y = profits / assets
    std::size_t dropped = 0;      // firms without a profits value
};

RoaPoints returns_on_assets(const Snapshot& s);

/// (log assets in `prev`, log assets in `next`) for firms present in both
/// under the same name. Input for the conditional-expectation diagnostic;
/// this is a fixed-bandwidth curve, not an adaptive stochastic kernel.
std::vector<XYPoint> growth_pairs(const Snapshot& prev, const Snapshot& next);

struct RegressionCurve {
    std::vector<double> grid;  // strictly increasing
    std::vector<double> estimate;
    std::vector<double> band_low;   // estimate - 1.96 se
    std::vector<double> band_high;  // estimate + 1.96 se
    double bandwidth = 0.0;
};

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> xs);

/// Kernel-weighted mean of y on `grid_size` equispaced points spanning the x
/// range. bandwidth == nullopt selects the Silverman rule. Pointwise 95%
/// bands use the kernel-weighted variance of leave-one-out residuals and a
/// Student-t quantile on the local effective sample size.
RegressionCurve nw_regress(std::span<const XYPoint> points, std::optional<double> bandwidth,
                           std::size_t grid_size = 100);

} // namespace shadowtail
