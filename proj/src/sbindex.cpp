#include "shadowtail/sbindex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>

#include "shadowtail/error.hpp"

namespace shadowtail {

namespace {

constexpr const char* kModule = "sbindex";

void check_inputs(std::span<const double> ranked_sizes, const ParetoFit& fit, std::size_t n_top) {
    if (n_top == 0) throw Error(kModule, "n_top must be at least 1");
    if (n_top > ranked_sizes.size())
        throw Error(kModule, "n_top (" + std::to_string(n_top) + ") exceeds snapshot size (" +
                                 std::to_string(ranked_sizes.size()) + ")");
    if (!std::is_sorted(ranked_sizes.begin(), ranked_sizes.begin() + static_cast<std::ptrdiff_t>(n_top),
                        std::greater<>()))
        throw Error(kModule, "sizes must be in descending rank order");
    if (n_top > fit.m_total) throw Error(kModule, "n_top exceeds the fitted sample size M");
}

} // namespace

std::vector<double> theoretical_sizes(const ParetoFit& fit, std::size_t n_top) {
    if (!(fit.gamma_hat > 0.0)) throw Error(kModule, "gamma_hat must be positive");
    if (n_top > fit.m_total) throw Error(kModule, "n_top exceeds the fitted sample size M");
    const double log_cm = fit.log_c_hat + std::log(static_cast<double>(fit.m_total));
    std::vector<double> out(n_top);
    for (std::size_t k = 1; k <= n_top; ++k)
        out[k - 1] = std::exp((log_cm - std::log(static_cast<double>(k))) / fit.gamma_hat);
    return out;
}

double index_value(std::span<const double> ranked_sizes, const ParetoFit& fit, std::size_t n_top) {
    check_inputs(ranked_sizes, fit, n_top);
    const auto hat = theoretical_sizes(fit, n_top);
    double sum = 0.0;
    for (std::size_t k = 0; k < n_top; ++k) sum += hat[k] - ranked_sizes[k];
    return sum;
}

std::pair<double, double> confidence_band(std::span<const double> ranked_sizes, const ParetoFit& fit,
                                          std::size_t n_top) {
    double lo = index_value(ranked_sizes, fit, n_top);
    double hi = lo;
    for (double dg : {-2.0 * fit.se_gamma, 2.0 * fit.se_gamma}) {
        for (double dc : {-2.0 * fit.se_log_c, 2.0 * fit.se_log_c}) {
            ParetoFit corner = fit;
            corner.gamma_hat += dg;
            corner.log_c_hat += dc;
            // A corner with a non-positive exponent has no finite extrapolation.
            if (!(corner.gamma_hat > 0.0)) throw Error(kModule, "gamma_hat - 2 se is not positive; band undefined");
            const double v = index_value(ranked_sizes, corner, n_top);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

std::pair<double, double> confidence_band(const Snapshot& s, const ParetoFit& fit, std::size_t n_top) {
    const auto sizes = s.ranked_assets();
    return confidence_band(sizes, fit, n_top);
}

SbIndexResult compute_index(std::span<const double> ranked_sizes, const ParetoFit& fit, std::size_t n_top) {
    check_inputs(ranked_sizes, fit, n_top);
    const auto hat = theoretical_sizes(fit, n_top);
    SbIndexResult r;
    r.n_top = n_top;
    r.per_rank_gap.reserve(n_top);
    for (std::size_t k = 0; k < n_top; ++k) {
        r.per_rank_gap.push_back(RankGap{k + 1, ranked_sizes[k], hat[k]});
        r.i_sb += hat[k] - ranked_sizes[k];
    }
    std::tie(r.band_low, r.band_high) = confidence_band(ranked_sizes, fit, n_top);
    return r;
}

SbIndexResult compute_index(const Snapshot& s, const ParetoFit& fit, std::size_t n_top) {
    const auto sizes = s.ranked_assets();
    return compute_index(sizes, fit, n_top);
}

} // namespace shadowtail
