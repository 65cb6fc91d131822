#include "shadowtail/tailfit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "shadowtail/error.hpp"

namespace shadowtail {

namespace {

constexpr const char* kModule = "tailfit";

struct Ols {
    double slope = 0.0;
    double intercept = 0.0;
    double se_slope = 0.0;
    double se_intercept = 0.0;
    double rss = 0.0;
    std::size_t n = 0;
};

// Two-pass centered OLS; xs has non-zero spread.
Ols ols(std::span<const double> xs, std::span<const double> ys) {
    const auto n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    Ols r;
    r.n = n;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - r.intercept - r.slope * xs[i];
        r.rss += e * e;
    }
    const double s2 = n > 2 ? r.rss / static_cast<double>(n - 2) : 0.0;
    r.se_slope = std::sqrt(s2 / sxx);
    r.se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    return r;
}

} // namespace

std::vector<CcdfPoint> empirical_ccdf(std::span<const double> sizes) {
    if (sizes.empty()) throw Error(kModule, "empty input");
    std::vector<double> sorted(sizes.begin(), sizes.end());
    for (double s : sorted)
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(kModule, "sizes must be positive and finite");
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double m = static_cast<double>(sorted.size());
    std::vector<CcdfPoint> out(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k)
        out[k] = CcdfPoint{sorted[k], static_cast<double>(k + 1) / m, k + 1};
    return out;
}

ParetoFit fit_pareto(std::span<const CcdfPoint> points, double s_minus, double s_plus) {
    if (!(s_minus > 0.0) || !(s_plus > s_minus))
        throw Error(kModule, "fit range must satisfy 0 < s_minus < s_plus");
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (p.size >= s_minus && p.size <= s_plus) {
            xs.push_back(std::log(p.size));
            ys.push_back(std::log(p.ccdf));
        }
    }
    if (xs.size() < 3)
        throw Error(kModule, "fewer than 3 points in range [" + std::to_string(s_minus) + ", " + std::to_string(s_plus) + "]");
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo == *hi) throw Error(kModule, "zero variance of log(size) in range");

    const Ols r = ols(xs, ys);
    if (!(r.slope < 0.0)) throw Error(kModule, "fitted slope is not negative; no Pareto exponent");

    ParetoFit fit;
    fit.gamma_hat = -r.slope;
    fit.log_c_hat = r.intercept;
    fit.s_minus = s_minus;
    fit.s_plus = s_plus;
    fit.se_gamma = r.se_slope;
    fit.se_log_c = r.se_intercept;
    fit.residual_rms = std::sqrt(r.rss / static_cast<double>(r.n));
    fit.n_points = r.n;
    fit.m_total = points.size();
    return fit;
}

FitRange range_for_ranks(std::span<const CcdfPoint> points, std::size_t rank_lo, std::size_t rank_hi) {
    if (rank_lo < 1 || rank_hi <= rank_lo || rank_hi > points.size())
        throw Error(kModule, "rank window must satisfy 1 <= lo < hi <= M");
    return FitRange{points[rank_hi - 1].size, points[rank_lo - 1].size};
}

FitRange suggest_range(std::span<const CcdfPoint> points, const RangeSearch& opts) {
    if (points.size() < 30) throw Error(kModule, "suggest_range needs at least 30 points");
    if (!(opts.log_step > 0.0)) throw Error(kModule, "log_step must be positive");

    // Ascending by size so that any [lo, hi] window is a contiguous block.
    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (auto it = points.rbegin(); it != points.rend(); ++it) {
        xs.push_back(std::log(it->size));
        ys.push_back(std::log(it->ccdf));
    }
    if (!std::is_sorted(xs.begin(), xs.end())) throw Error(kModule, "points must be in descending size order");

    // Prefix sums around a shift keep the moment formulas well conditioned.
    const double x0 = xs[xs.size() / 2], y0 = ys[ys.size() / 2];
    const std::size_t n = xs.size();
    std::vector<double> sx(n + 1, 0.0), sy(n + 1, 0.0), sxx(n + 1, 0.0), syy(n + 1, 0.0), sxy(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - x0, dy = ys[i] - y0;
        sx[i + 1] = sx[i] + dx;
        sy[i + 1] = sy[i] + dy;
        sxx[i + 1] = sxx[i] + dx * dx;
        syy[i + 1] = syy[i] + dy * dy;
        sxy[i + 1] = sxy[i] + dx * dy;
    }

    const double step = opts.log_step;
    // Small slack so that values sitting on a grid node are not lost to rounding.
    const double slack = 1e-9;
    const auto j_lo = static_cast<long>(std::floor(xs.front() / step + slack));
    const auto j_hi = static_cast<long>(std::ceil(xs.back() / step - slack));

    auto first_at_or_above = [&](double v) {
        return static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), v - slack) - xs.begin());
    };
    auto first_above = [&](double v) {
        return static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), v + slack) - xs.begin());
    };

    bool found = false;
    std::size_t best_count = 0;
    double best_rms = std::numeric_limits<double>::infinity();
    FitRange best;
    for (long a = j_lo; a < j_hi; ++a) {
        const std::size_t i0 = first_at_or_above(static_cast<double>(a) * step);
        for (long b = a + 1; b <= j_hi; ++b) {
            const std::size_t i1 = first_above(static_cast<double>(b) * step);
            if (i1 <= i0) continue;
            const std::size_t cnt = i1 - i0;
            if (cnt < std::max<std::size_t>(opts.min_points, 3) || cnt < best_count) continue;
            const double m = static_cast<double>(cnt);
            const double mx = (sx[i1] - sx[i0]) / m, my = (sy[i1] - sy[i0]) / m;
            const double cxx = (sxx[i1] - sxx[i0]) - m * mx * mx;
            const double cyy = (syy[i1] - syy[i0]) - m * my * my;
            const double cxy = (sxy[i1] - sxy[i0]) - m * mx * my;
            if (cxx <= 1e-12 * m) continue;
            const double rss = std::max(0.0, cyy - cxy * cxy / cxx);
            const double rms = std::sqrt(rss / m);
            if (rms >= opts.max_residual_rms || cxy >= 0.0) continue;
            if (!found || cnt > best_count || (cnt == best_count && rms < best_rms - 1e-12)) {
                found = true;
                best_count = cnt;
                best_rms = rms;
                best = FitRange{std::exp(static_cast<double>(a) * step), std::exp(static_cast<double>(b) * step)};
            }
        }
    }
    if (!found) throw Error(kModule, "no candidate range satisfies the residual threshold");
    return best;
}

} // namespace shadowtail
