#pragma once

// Proportional random growth with Poisson exit/entry and largest-firm
// shedding.
//
// Each firm's size follows a geometric random walk. Firms exit at rate h and
// new firms enter at rate nu with size `entry_size`. At rate lambda the
// currently largest firm loses a fraction epsilon of its observed size.
// Without shedding the stationary upper tail is Pareto with exponent
//
//     gamma = (a + sqrt(a^2 + 8 h / sigma^2)) / 2,   a = 1 - 2 mu / sigma^2
//
// where mu is the geometric drift (E[dS/S] = mu dt).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shadowtail/dataset.hpp"

namespace shadowtail {

/// How `mu` is read. Geometric: E[dS/S] = mu dt, so log-size drifts at
/// mu - sigma^2/2. Log: log-size drifts at mu.
enum class DriftConvention { geometric, log };

DriftConvention drift_convention_from_string(const std::string& s);
std::string to_string(DriftConvention c);

struct PrgParams {
    double mu = 0.0;
    double sigma = 0.1;
    double h = 0.0;        // exit rate per firm per year
    double nu = 0.0;       // entries per year
    double lambda = 0.0;   // shedding events per year
    double epsilon = 0.1;  // fraction shed per event
    double entry_size = 1.0;
    DriftConvention drift = DriftConvention::geometric;

    /// Drift of log-size per year.
    double log_drift() const noexcept;
    /// mu expressed in the geometric convention, as the exponent formula expects.
    double geometric_mu() const noexcept;
    void validate() const;
};

struct SimConfig {
    std::size_t n_firms_init = 20000;
    double dt = 0.01;        // years
    double burn_in = 200.0;  // years
    double horizon = 10.0;   // years simulated after burn-in; sizes are read at the end
    std::uint64_t seed = 1;
    std::size_t keep_top = 2000;
    bool record_events = false;

    void validate() const;
    /// Non-fatal advice, e.g. a burn-in shorter than 50 * max(1/h, 1) years.
    std::vector<std::string> warnings(const PrgParams& p) const;
    double total_years() const noexcept { return burn_in + horizon; }
};

struct EventCounts {
    std::uint64_t entries = 0;
    std::uint64_t exits = 0;
    std::uint64_t sheddings = 0;
};

struct ShedEvent {
    double time = 0.0;  // years since start
    std::uint64_t firm_id = 0;
    double size_before = 0.0;
    double size_after = 0.0;
    double shed = 0.0;  // size_before - size_after
};

struct SimResult {
    std::vector<double> sizes_top;  // descending, at most keep_top
    double shed_total = 0.0;        // over the whole run, burn-in included
    EventCounts n_events;           // over the whole run
    std::size_t population = 0;     // firms alive at the end
    std::vector<ShedEvent> events;  // filled when SimConfig::record_events
};

/// Pareto exponent of the stationary tail; mu in the geometric convention.
double gamma_from_params(double mu, double sigma, double h);

/// Exit rate that yields `gamma`: h = sigma^2 * gamma * (gamma - a) / 2.
/// Throws when the result would be negative.
double h_from_gamma(double gamma, double mu, double sigma);

struct DriftVolEstimate {
    double mu_hat = 0.0;
    double sigma_hat = 0.0;
    std::size_t n_matched = 0;
};

/// Log growth rates of firms present in both snapshots (exact name match;
/// names repeated within either snapshot are skipped). sigma_hat is the
/// sample standard deviation; mu_hat is the mean log rate, plus
/// sigma_hat^2 / 2 in the geometric convention.
DriftVolEstimate estimate_drift_vol(const Snapshot& prev, const Snapshot& next,
                                    DriftConvention convention = DriftConvention::geometric,
                                    std::size_t min_matches = 30);

/// Seed of replica `index` derived from a base seed (splitmix64 of
/// seed + (index + 1) * golden-ratio constant).
std::uint64_t replica_seed(std::uint64_t seed, std::size_t index);

/// Runs one replica. Deterministic for a given (params, config).
SimResult simulate(const PrgParams& params, const SimConfig& config);

} // namespace shadowtail
