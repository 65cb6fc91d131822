#pragma once

// Empirical tail statistics and the log-log least-squares Pareto fit
//
//     log Prob{S >= x} = log c - gamma * log x
//
// over an intermediate size range [s_minus, s_plus]. All logs are natural.

#include <cstddef>
#include <span>
#include <vector>

namespace shadowtail {

struct CcdfPoint {
    double size = 0.0;
    double ccdf = 0.0;  // rank / M
    std::size_t rank = 0;
};

/// Points in descending size order; the k-th of M gets ccdf k/M. Tied sizes
/// still receive distinct consecutive ranks. Throws on empty or non-positive
/// input.
std::vector<CcdfPoint> empirical_ccdf(std::span<const double> sizes);

struct ParetoFit {
    double gamma_hat = 0.0;
    double log_c_hat = 0.0;
    double s_minus = 0.0;
    double s_plus = 0.0;
    double se_gamma = 0.0;
    double se_log_c = 0.0;      // OLS standard error of the intercept
    double residual_rms = 0.0;  // sqrt(RSS / n) in log-ccdf units
    std::size_t n_points = 0;
    std::size_t m_total = 0;    // every point passed in, not just the in-range ones
};

/// OLS of log(ccdf) on log(size) over points with s_minus <= size <= s_plus.
/// gamma_hat is minus the slope. Throws when fewer than three points fall in
/// range, when log(size) has no spread there, or when the slope is not
/// negative.
ParetoFit fit_pareto(std::span<const CcdfPoint> points, double s_minus, double s_plus);

struct FitRange {
    double s_minus = 0.0;
    double s_plus = 0.0;
};

/// Size range spanning ranks [rank_lo, rank_hi] (1-based, inclusive) of a
/// CCDF in descending order.
FitRange range_for_ranks(std::span<const CcdfPoint> points, std::size_t rank_lo, std::size_t rank_hi);

struct RangeSearch {
    double log_step = 0.1;          // candidate endpoints are exp(j * log_step)
    double max_residual_rms = 0.05; // in log-ccdf units
    std::size_t min_points = 3;
};

/// Heuristic range picker. Among endpoint pairs on the log grid it returns
/// the one holding the most points whose fit residual RMS stays under the
/// threshold (ties: smaller RMS, then lower s_minus). Needs >= 30 points.
FitRange suggest_range(std::span<const CcdfPoint> points, const RangeSearch& opts = {});

} // namespace shadowtail
