// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `acceptance 3 8` runs a subset.
//
// Tolerances and sample sizes are fixed here and never tuned to outcomes;
// every random quantity derives from the constant seeds below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "shadowtail/calibrate.hpp"
#include "shadowtail/dataset.hpp"
#include "shadowtail/kernelreg.hpp"
#include "shadowtail/prgsim.hpp"
#include "shadowtail/sbindex.hpp"
#include "shadowtail/tailfit.hpp"

using namespace shadowtail;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, not_applicable };

struct Outcome {
    Status status;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0: none stated
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

PrgParams table2012(double lambda, std::size_t n) {
    PrgParams p;
    p.mu = 0.09;
    p.sigma = 0.17;
    p.h = 0.08;
    p.nu = p.h * static_cast<double>(n);
    p.lambda = lambda;
    p.epsilon = 0.1;
    return p;
}

ParetoFit fit_ranks(const std::vector<double>& desc, std::size_t lo, std::size_t hi) {
    const auto pts = empirical_ccdf(desc);
    const FitRange r = range_for_ranks(pts, lo, hi);
    return fit_pareto(pts, r.s_minus, r.s_plus);
}

// ---------------------------------------------------------------------------

Outcome c1_roundtrip() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> g(0.2, 4.0), mu(-0.3, 0.3), sg(0.02, 1.0);
    double worst = 0.0;
    int n = 0;
    while (n < 1000) {
        const double gamma = g(rng), m = mu(rng), s = sg(rng);
        if (gamma < 1.0 - 2.0 * m / (s * s)) continue;  // outside the valid set (h < 0)
        worst = std::max(worst, std::abs(gamma_from_params(m, s, h_from_gamma(gamma, m, s)) - gamma));
        ++n;
    }
    return verdict(worst <= 1e-12, fmt("max |err| = %.3g over %d triples (tol 1e-12)", worst, n));
}

Outcome c2_table() {
    std::string d;
    bool ok = true;
    for (const auto& r : oracle::table2()) {
        const double h = h_from_gamma(r.gamma, r.mu, r.sigma);
        ok = ok && std::abs(h - r.h) <= 0.01;
        d += fmt("%d:%.4f/%.2f ", r.year, h, r.h);
    }
    return verdict(ok, d + "(computed/printed, tol 0.01)");
}

Outcome c3_pareto_fit() {
    double sum = 0.0;
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const double g = fit_ranks(oracle::pareto_sample(2000, 0.9, 1.0, seed), 100, 1500).gamma_hat;
        sum += g;
        within += std::abs(g - 0.9) <= 0.05;
        worst = std::max(worst, std::abs(g - 0.9));
    }
    const double mean = sum / 100.0;
    return verdict(std::abs(mean - 0.9) <= 0.02 && within == 100,
                   fmt("mean gamma_hat = %.4f (tol 0.9 +- 0.02); per-seed within 0.05: %d/100 (need 100), "
                       "worst |dev| = %.4f",
                       mean, within, worst));
}

Outcome c4_index_oracle() {
    int close = 0, covered = 0;
    std::vector<double> rel;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto c = oracle::capped_pareto(2000, 0.9, 1.0, 20, seed);
        const ParetoFit f = fit_ranks(c.sizes, 100, 1500);
        const SbIndexResult r = compute_index(c.sizes, f, 1000);
        const double e = (r.i_sb - c.removed) / c.removed;
        rel.push_back(e);
        close += std::abs(e) <= 0.10;
        covered += r.band_low <= c.removed && c.removed <= r.band_high;
    }
    std::sort(rel.begin(), rel.end());
    return verdict(close >= 90 && covered >= 90,
                   fmt("within 10%% of removed mass: %d/100 (need 90); band covers: %d/100 (need 90); "
                       "median rel. error %.3f",
                       close, covered, 0.5 * (rel[49] + rel[50])));
}

Outcome c5_n_insensitivity() {
    // Change relative to the default N = 1000 for every admissible N (S_[N]
    // inside the fit range); the full max-min spread is reported alongside.
    double worst = 0.0, worst_spread = 0.0;
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto c = oracle::capped_pareto(2000, 0.9, 1.0, 20, seed);
        const ParetoFit f = fit_ranks(c.sizes, 100, 1500);
        const auto hat = theoretical_sizes(f, 2000);
        const double ref = index_value(c.sizes, f, 1000);
        double run = 0.0, dev = 0.0, lo = INFINITY, hi = -INFINITY;
        for (std::size_t k = 1; k <= 2000; ++k) {
            run += hat[k - 1] - c.sizes[k - 1];
            if (c.sizes[k - 1] >= f.s_minus && c.sizes[k - 1] <= f.s_plus) {
                dev = std::max(dev, std::abs(run - ref) / std::abs(ref));
                lo = std::min(lo, run);
                hi = std::max(hi, run);
            }
        }
        worst = std::max(worst, dev);
        worst_spread = std::max(worst_spread, (hi - lo) / std::abs(ref));
        ok += dev < 0.02;
    }
    return verdict(ok == 100, fmt("max |I(N) - I(1000)| / |I(1000)| < 2%% in %d/100 seeds (need 100); worst %.2f%%; "
                                  "worst max-min spread %.2f%%",
                                  ok, 100.0 * worst, 100.0 * worst_spread));
}

struct PairedRuns {
    std::vector<std::vector<double>> free, shed;
};

// Shared by criteria 6 and 7: full-size population, paired seeds.
const PairedRuns& paired_runs() {
    static const PairedRuns runs = [] {
        PairedRuns r;
        const std::size_t n = 20000;
        for (std::uint64_t s = 1; s <= 20; ++s) {
            SimConfig c;
            c.n_firms_init = n;
            c.seed = 6000 + s;
            r.free.push_back(simulate(table2012(0.0, n), c).sizes_top);
            r.shed.push_back(simulate(table2012(12.0, n), c).sizes_top);
        }
        return r;
    }();
    return runs;
}

Outcome c6_sim_theory() {
    const double theory = gamma_from_params(0.09, 0.17, 0.08);
    double sum = 0.0;
    for (const auto& top : paired_runs().free) sum += fit_ranks(top, 20, 1500).gamma_hat;
    const double mean = sum / 20.0;
    return verdict(std::abs(mean - theory) <= 0.05,
                   fmt("mean gamma_hat (ranks 20-1500 of top 2000, 20 seeds) = %.4f vs %.4f (tol 0.05)", mean,
                       theory));
}

Outcome c7_interruption() {
    double r0 = 0.0, r1 = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        r0 += paired_runs().free[i][0] / paired_runs().free[i][19] / 20.0;
        r1 += paired_runs().shed[i][0] / paired_runs().shed[i][19] / 20.0;
    }
    return verdict(r1 <= 0.5 * r0, fmt("mean S1/S20: lambda=0 %.3f, lambda=12 %.3f (need <= %.3f)", r0, r1, 0.5 * r0));
}

// Desk scale: population 5000, keep_top 500, objective over the top 500.
constexpr std::size_t kDeskN = 5000;
constexpr std::size_t kDeskTop = 500;

SimConfig desk_config(std::uint64_t seed) {
    SimConfig c;
    c.n_firms_init = kDeskN;
    c.keep_top = kDeskTop;
    c.seed = seed;
    return c;
}

std::vector<double> observe(double lambda, double epsilon, std::uint64_t seed, double dt = 0.01) {
    PrgParams p = table2012(lambda, kDeskN);
    p.epsilon = epsilon;
    SimConfig c = desk_config(seed);
    c.dt = dt;
    return simulate(p, c).sizes_top;
}

Outcome c8_calibration() {
    std::vector<double> grid(31);
    std::iota(grid.begin(), grid.end(), 0.0);
    // One replica bank (100 replicas per candidate, common random numbers)
    // serves every observed list below; observed lists use disjoint seeds.
    const auto bank = simulate_grid(table2012(0.0, kDeskN), desk_config(8000), grid, CalibrationOptions{100, kDeskTop, 0});
    auto lambda_hat = [&](const std::vector<double>& obs) {
        return calibrate_against(bank, obs, 0.1, 8000, kDeskTop).lambda_hat;
    };

    // Pre-registered trial (first seed), plus repeated trials as diagnostics.
    const double primary = lambda_hat(observe(12.0, 0.1, 812001));
    int in_band = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        const double l = lambda_hat(observe(12.0, 0.1, 812001 + t));
        in_band += l >= 8.0 && l <= 16.0;
    }
    int zero = 0;
    for (std::uint64_t t = 0; t < 100; ++t) zero += lambda_hat(observe(0.0, 0.1, 800001 + t)) == 0.0;
    const bool ok = primary >= 8.0 && primary <= 16.0 && zero >= 90;
    return verdict(ok, fmt("lambda*=12: lambda_hat = %g (need [8,16]; %d/20 repeated trials in band); "
                           "lambda*=0: lambda_hat = 0 in %d/100 trials (need 90)",
                           primary, in_band, zero));
}

Outcome c9_flux() {
    // dt small enough that grid/epsilon stays below 0.5 events per step.
    const double dt = 0.004;
    const auto observed = observe(12.0, 0.1, 900001, dt);
    std::vector<double> fgrid;
    for (int i = 0; i <= 12; ++i) fgrid.push_back(0.2 * i);
    SimConfig c = desk_config(9000);
    c.dt = dt;
    const std::vector<double> eps{0.02, 0.05, 0.1};
    const auto scan = flux_scan(table2012(0.0, kDeskN), c, observed, eps, fgrid, CalibrationOptions{30, kDeskTop, 0},
                                GridUnits::flux);
    bool pair_ok = true, near_ok = true;
    std::string d;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        d += fmt("eps=%g: %.3g  ", scan[i].epsilon, scan[i].flux);
        near_ok = near_ok && std::abs(scan[i].flux - 1.2) <= 0.25 * 1.2;
        for (std::size_t j = i + 1; j < scan.size(); ++j) {
            const double a = scan[i].flux, b = scan[j].flux;
            pair_ok = pair_ok && std::min(a, b) > 0.0 && std::abs(a - b) <= 0.25 * std::min(a, b);
        }
    }
    return verdict(pair_ok && near_ok, d + fmt("(pairwise within 25%%: %s; each within 25%% of 1.2: %s)",
                                              pair_ok ? "yes" : "no", near_ok ? "yes" : "no"));
}

Outcome c10_scale() {
    std::mt19937_64 rng(1010);
    std::lognormal_distribution<double> d(0.0, 2.0);
    auto desc = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = d(rng);
        std::sort(v.begin(), v.end(), std::greater<>());
        return v;
    };
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto obs = desc(1000);
        std::vector<std::vector<double>> sims;
        for (int r = 0; r < 20; ++r) sims.push_back(desc(1000));
        auto scaled = sims;
        for (auto& s : scaled)
            for (auto& x : s) x *= 10.0;
        worst = std::max(worst, std::abs(zk_objective(scaled, obs).mse - zk_objective(sims, obs).mse));
    }
    return verdict(worst <= 1e-12, fmt("max |mse(10x) - mse| = %.3g over 50 cases (tol 1e-12)", worst));
}

Outcome c11_kernel() {
    std::mt19937_64 rng(1111);
    std::normal_distribution<double> x(3.0, 1.5), e(0.0, 0.02);
    std::vector<XYPoint> flat(500);
    for (auto& p : flat) p = {x(rng), 0.05};
    const auto cc = nw_regress(flat, std::nullopt, 100);
    const bool exact = std::all_of(cc.estimate.begin(), cc.estimate.end(), [](double v) { return v == 0.05; });

    // Pointwise bands, so coverage is pooled over a batch of 20 datasets.
    int inside = 0, full = 0;
    for (int s = 0; s < 20; ++s) {
        std::vector<XYPoint> pts(500);
        for (auto& p : pts) p = {x(rng), 0.05 + e(rng)};
        const auto c = nw_regress(pts, std::nullopt, 100);
        int here = 0;
        for (std::size_t i = 0; i < c.grid.size(); ++i) here += c.band_low[i] <= 0.05 && 0.05 <= c.band_high[i];
        inside += here;
        full += here >= 95;
    }
    const double share = inside / 2000.0;
    return verdict(exact && share >= 0.95,
                   fmt("constant input exact: %s; noisy flat ROA: truth inside band at %.1f%% of grid points over "
                       "20 datasets (need 95%%; %d/20 datasets individually >= 95%%)",
                       exact ? "yes" : "no", 100.0 * share, full));
}

// Only meaningful with the FG2000 files: set SHADOWTAIL_FG2000_DIR to a
// directory holding <list_year>.csv files.
Outcome c12_external() {
    const char* dir = std::getenv("SHADOWTAIL_FG2000_DIR");
    if (!dir || !fs::is_directory(dir))
        return {Status::not_applicable, "no FG2000 files supplied (SHADOWTAIL_FG2000_DIR unset); synthetic suite only"};
    struct Row {
        int year;
        double s_minus, s_plus, gamma, gamma_fin;
    };
    const Row rows[] = {{2004, 14.88, 665.14, 0.926, 0.710}, {2006, 11.02, 897.85, 0.889, 0.678},
                        {2007, 12.18, 992.27, 0.871, 0.645}, {2008, 12.18, 1096.63, 0.864, 0.655},
                        {2009, 14.88, 1339.43, 0.899, 0.672}, {2010, 14.88, 1339.43, 0.891, 0.674},
                        {2011, 18.17, 1339.43, 0.899, 0.669}, {2012, 24.53, 1635.98, 0.905, 0.648},
                        {2013, 24.53, 1998.20, 0.897, 0.627}};
    const std::map<int, double> shares{{2004, 0.70}, {2013, 0.87}};
    const auto cls = SectorClassifier::forbes_default();
    bool ok = true;
    int seen = 0;
    std::string d;
    for (const Row& r : rows) {
        const fs::path p = fs::path(dir) / (std::to_string(r.year) + ".csv");
        if (!fs::exists(p)) continue;
        ++seen;
        const Snapshot s = load_snapshot(p, r.year).snapshot;
        const double g = fit_pareto(empirical_ccdf(s.ranked_assets()), r.s_minus, r.s_plus).gamma_hat;
        const double gf = fit_pareto(empirical_ccdf(sector_subset(s, cls, Sector::financial).ranked_assets()),
                                     r.s_minus, r.s_plus)
                              .gamma_hat;
        ok = ok && std::abs(g - r.gamma) <= 0.01 && std::abs(gf - r.gamma_fin) <= 0.01;
        d += fmt("%d: %.3f/%.3f fin %.3f/%.3f ", r.year, g, r.gamma, gf, r.gamma_fin);
        if (auto it = shares.find(r.year); it != shares.end()) {
            const double sh = sector_summary(s, cls).asset_share;
            ok = ok && std::abs(sh - it->second) <= 0.02;
            d += fmt("share %.3f/%.2f ", sh, it->second);
        }
    }
    if (seen == 0) return {Status::not_applicable, std::string("no <year>.csv files in ") + dir};
    return verdict(ok, d + "(tol gamma 0.01, shares 0.02)");
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "exponent round trip", 1.0, c1_roundtrip},
        {2, "parameter table consistency", 1.0, c2_table},
        {3, "Pareto fit oracle", 10.0, c3_pareto_fit},
        {4, "index oracle (capped Pareto)", 30.0, c4_index_oracle},
        {5, "index insensitivity to N", 0.0, c5_n_insensitivity},
        {6, "simulator vs exponent formula", 120.0, c6_sim_theory},
        {7, "shedding flattens the top tail", 0.0, c7_interruption},
        {8, "calibration self-consistency", 600.0, c8_calibration},
        {9, "flux invariance", 0.0, c9_flux},
        {10, "objective scale invariance", 0.0, c10_scale},
        {11, "kernel regression", 0.0, c11_kernel},
        {12, "external-data reproduction", 0.0, c12_external},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit_s > 0.0 && secs > c.time_limit_s && o.status == Status::pass)
            o = {Status::fail, o.detail + fmt(" [over time limit %.0f s]", c.time_limit_s)};
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "N/A ";
        std::printf("[%s] %2d %-32s %s (%.2f s%s)\n", tag, c.id, c.name, o.detail.c_str(), secs,
                    c.time_limit_s > 0.0 ? fmt(", limit %.0f s", c.time_limit_s).c_str() : "");
        std::fflush(stdout);
        failed += o.status == Status::fail;
    }
    std::printf("%d criterion(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
