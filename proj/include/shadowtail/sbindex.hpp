#pragma once

// Shadow-banking index: the top-tail mass missing relative to a fitted power
// law,  I = sum_{k=1..N} (S_hat[k] - S[k]).

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "shadowtail/dataset.hpp"
#include "shadowtail/tailfit.hpp"

namespace shadowtail {

struct RankGap {
    std::size_t rank = 0;
    double observed = 0.0;
    double theoretical = 0.0;
};

struct SbIndexResult {
    double i_sb = 0.0;  // same unit as the sizes (billions for snapshots)
    std::size_t n_top = 0;
    std::vector<RankGap> per_rank_gap;  // ranks 1..n_top
    double band_low = 0.0;
    double band_high = 0.0;
};

/// Sizes the fitted line assigns to ranks 1..n_top: the k-th largest firm
/// sits at CCDF level k/M, so S_hat[k] = (c * M / k)^(1 / gamma).
std::vector<double> theoretical_sizes(const ParetoFit& fit, std::size_t n_top);

/// Signed sum of S_hat[k] - S[k] over the top n_top ranks. Gaps above the
/// line count negatively.
double index_value(std::span<const double> ranked_sizes, const ParetoFit& fit, std::size_t n_top);

/// Range of the index over the four corners (gamma +- 2 se, log c +- 2 se)
/// together with the central value.
std::pair<double, double> confidence_band(std::span<const double> ranked_sizes, const ParetoFit& fit,
                                          std::size_t n_top);
std::pair<double, double> confidence_band(const Snapshot& s, const ParetoFit& fit, std::size_t n_top);

/// `ranked_sizes` must be in descending order.
SbIndexResult compute_index(std::span<const double> ranked_sizes, const ParetoFit& fit, std::size_t n_top = 1000);
SbIndexResult compute_index(const Snapshot& s, const ParetoFit& fit, std::size_t n_top = 1000);

} // namespace shadowtail
