#include "shadowtail/kernelreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "shadowtail/error.hpp"

namespace shadowtail {

namespace {

constexpr const char* kModule = "kernelreg";
constexpr double kZ95 = 1.96;

// Two-sided 95% quantile for a local mean resting on n_eff effective points;
// tends to 1.96 in the interior of dense data, widens near sparse edges.
double band_quantile(double n_eff) {
    if (!(n_eff > 2.0)) n_eff = 2.0;
    if (n_eff > 1e6) return kZ95;
    return boost::math::quantile(boost::math::complement(boost::math::students_t(n_eff - 1.0), 0.025));
}

struct Fit {
    double mean = 0.0;
    double sum_w = 0.0;
    double sum_w2 = 0.0;
};

// Weights are rescaled by the largest one, so sum_w >= 1 and far-away grid
// points never divide by an underflowed zero. The mean is taken relative to
// `ref` so that constant y comes back bit-exact.
Fit local_mean(std::span<const XYPoint> pts, double x0, double bw, double ref, std::vector<double>& w) {
    double umin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double u = (pts[i].x - x0) / bw;
        w[i] = 0.5 * u * u;
        umin = std::min(umin, w[i]);
    }
    Fit f;
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        w[i] = std::exp(umin - w[i]);
        f.sum_w += w[i];
        f.sum_w2 += w[i] * w[i];
        acc += w[i] * (pts[i].y - ref);
    }
    f.mean = ref + acc / f.sum_w;
    return f;
}

} // namespace

RoaPoints returns_on_assets(const Snapshot& s) {
    RoaPoints r;
    for (const auto& f : s.firms()) {
        if (!f.profits) {
            ++r.dropped;
            continue;
        }
        r.points.push_back(XYPoint{std::log(f.assets), *f.profits / f.assets});
    }
    if (r.points.empty()) throw Error(kModule, "empty result: no firm reports profits");
    return r;
}

std::vector<XYPoint> growth_pairs(const Snapshot& prev, const Snapshot& next) {
    std::map<std::string, double> later;
    std::map<std::string, int> seen;
    for (const auto& f : next.firms()) {
        later[f.name] = f.assets;
        ++seen[f.name];
    }
    std::map<std::string, int> seen_prev;
    for (const auto& f : prev.firms()) ++seen_prev[f.name];

    std::vector<XYPoint> out;
    for (const auto& f : prev.firms()) {
        if (seen_prev[f.name] != 1) continue;
        const auto it = later.find(f.name);
        if (it == later.end() || seen[f.name] != 1) continue;
        out.push_back(XYPoint{std::log(f.assets), std::log(it->second)});
    }
    if (out.empty()) throw Error(kModule, "empty result: no firm appears in both snapshots");
    return out;
}

double silverman_bandwidth(std::span<const double> xs) {
    const auto n = xs.size();
    if (n < 2) throw Error(kModule, "bandwidth rule needs at least 2 points");
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, n - 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

RegressionCurve nw_regress(std::span<const XYPoint> points, std::optional<double> bandwidth, std::size_t grid_size) {
    if (points.size() < 10) throw Error(kModule, "need at least 10 points");
    if (grid_size < 2) throw Error(kModule, "grid_size must be at least 2");
    if (bandwidth && !(*bandwidth > 0.0)) throw Error(kModule, "bandwidth must be positive");

    std::vector<double> xs;
    xs.reserve(points.size());
    for (const auto& p : points) xs.push_back(p.x);
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    if (!(*xmax > *xmin)) throw Error(kModule, "x values have zero range");

    const double bw = bandwidth ? *bandwidth : silverman_bandwidth(xs);
    if (!(bw > 0.0)) throw Error(kModule, "automatic bandwidth is zero");
    const double ref = points.front().y;
    const std::size_t n = points.size();
    std::vector<double> w(n);

    // Leave-one-out residuals at the data points: e_i / (1 - L_ii), where the
    // self-weight share is L_ii = 1 / sum_w since w_ii = 1 after rescaling.
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Fit f = local_mean(points, points[i].x, bw, ref, w);
        const double lii = 1.0 / f.sum_w;
        const double resid = points[i].y - f.mean;
        loo[i] = lii < 1.0 ? resid / (1.0 - lii) : 0.0;
    }

    RegressionCurve c;
    c.bandwidth = bw;
    c.grid.resize(grid_size);
    c.estimate.resize(grid_size);
    c.band_low.resize(grid_size);
    c.band_high.resize(grid_size);
    const double span = *xmax - *xmin;
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double x0 = g + 1 == grid_size ? *xmax : *xmin + span * static_cast<double>(g) / static_cast<double>(grid_size - 1);
        const Fit f = local_mean(points, x0, bw, ref, w);
        double var_num = 0.0;
        for (std::size_t i = 0; i < n; ++i) var_num += w[i] * loo[i] * loo[i];
        const double resid_var = var_num / f.sum_w;
        const double se = std::sqrt(resid_var * f.sum_w2) / f.sum_w;
        c.grid[g] = x0;
        c.estimate[g] = f.mean;
        const double q = band_quantile(f.sum_w * f.sum_w / f.sum_w2);
        c.band_low[g] = f.mean - q * se;
        c.band_high[g] = f.mean + q * se;
    }
    return c;
}

} // namespace shadowtail
