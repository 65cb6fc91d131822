#include "shadowtail/prgsim.hpp"

#include <cmath>
#include <map>
#include <string>

#include "shadowtail/error.hpp"

namespace shadowtail {

namespace {
constexpr const char* kModule = "prgsim";
}

DriftConvention drift_convention_from_string(const std::string& s) {
    if (s == "geometric") return DriftConvention::geometric;
    if (s == "log") return DriftConvention::log;
    throw Error(kModule, "unknown drift convention '" + s + "' (expected geometric|log)");
}

std::string to_string(DriftConvention c) {
    return c == DriftConvention::geometric ? "geometric" : "log";
}

double PrgParams::log_drift() const noexcept {
    return drift == DriftConvention::geometric ? mu - 0.5 * sigma * sigma : mu;
}

double PrgParams::geometric_mu() const noexcept {
    return drift == DriftConvention::geometric ? mu : mu + 0.5 * sigma * sigma;
}

void PrgParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(kModule, "sigma must be positive");
    if (!std::isfinite(mu)) throw Error(kModule, "mu must be finite");
    if (!(h >= 0.0)) throw Error(kModule, "exit rate h must be non-negative");
    if (!(nu >= 0.0)) throw Error(kModule, "entry rate nu must be non-negative");
    if (!(lambda >= 0.0)) throw Error(kModule, "shedding rate lambda must be non-negative");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(kModule, "epsilon must lie in (0, 1)");
    if (!(entry_size > 0.0)) throw Error(kModule, "entry_size must be positive");
}

void SimConfig::validate() const {
    if (n_firms_init == 0) throw Error(kModule, "n_firms_init must be positive");
    if (!(dt > 0.0) || dt > 0.1) throw Error(kModule, "dt must lie in (0, 0.1] years");
    if (!(burn_in > 0.0)) throw Error(kModule, "burn_in must be positive");
    if (!(horizon > 0.0)) throw Error(kModule, "horizon must be positive");
    if (keep_top == 0) throw Error(kModule, "keep_top must be positive");
}

std::vector<std::string> SimConfig::warnings(const PrgParams& p) const {
    std::vector<std::string> out;
    if (p.h > 0.0) {
        const double relax = 50.0 * std::max(1.0 / p.h, 1.0);
        if (burn_in < relax)
            out.push_back("burn_in " + std::to_string(burn_in) + "y is shorter than the relaxation heuristic 50*max(1/h,1) = " +
                          std::to_string(relax) + "y");
    }
    return out;
}

double gamma_from_params(double mu, double sigma, double h) {
    if (!(sigma > 0.0)) throw Error(kModule, "sigma must be positive");
    if (!(h >= 0.0)) throw Error(kModule, "h must be non-negative");
    const double s2 = sigma * sigma;
    const double a = 1.0 - 2.0 * mu / s2;
    return 0.5 * (a + std::sqrt(a * a + 8.0 * h / s2));
}

double h_from_gamma(double gamma, double mu, double sigma) {
    if (!(sigma > 0.0)) throw Error(kModule, "sigma must be positive");
    if (!(gamma > 0.0)) throw Error(kModule, "gamma must be positive");
    const double s2 = sigma * sigma;
    const double a = 1.0 - 2.0 * mu / s2;
    const double h = 0.5 * s2 * gamma * (gamma - a);
    if (h < 0.0) throw Error(kModule, "parameters imply a negative exit rate h = " + std::to_string(h));
    return h;
}

DriftVolEstimate estimate_drift_vol(const Snapshot& prev, const Snapshot& next, DriftConvention convention,
                                    std::size_t min_matches) {
    // name -> assets, with repeated names mapped to NaN and ignored
    auto index = [](const Snapshot& s) {
        std::map<std::string, double> m;
        for (const auto& f : s.firms()) {
            auto [it, inserted] = m.emplace(f.name, f.assets);
            if (!inserted) it->second = std::nan("");
        }
        return m;
    };
    const auto a = index(prev);
    const auto b = index(next);

    std::vector<double> r;
    for (const auto& [name, s0] : a) {
        const auto it = b.find(name);
        if (it == b.end() || std::isnan(s0) || std::isnan(it->second)) continue;
        r.push_back(std::log(it->second / s0));
    }
    if (r.size() < std::max<std::size_t>(min_matches, 2))
        throw Error(kModule, "too few matched firms (" + std::to_string(r.size()) + ")");

    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double v : r) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(r.size() - 1));

    DriftVolEstimate e;
    e.sigma_hat = sd;
    e.mu_hat = convention == DriftConvention::geometric ? mean + 0.5 * sd * sd : mean;
    e.n_matched = r.size();
    return e;
}

std::uint64_t replica_seed(std::uint64_t seed, std::size_t index) {
    std::uint64_t z = seed + (static_cast<std::uint64_t>(index) + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace shadowtail
