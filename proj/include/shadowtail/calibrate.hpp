#pragma once

// Grid calibration of the shedding rate lambda against an observed top-N
// size list, using the rank-wise log-ratio objective
//
//     Z_k = < log(S_k / S0_k) >_replicas,   mse = sum_k (Z_k - mean Z)^2 / N
//
// which ignores any overall scale difference between model and data.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shadowtail/prgsim.hpp"

namespace shadowtail {

struct ZkObjective {
    std::vector<double> z_k;  // k = 1..N
    double z_bar = 0.0;
    double mse = 0.0;
    std::size_t n_replicas = 0;
};

/// Compares the top n_ranks of every replica against the top n_ranks of
/// `observed`. All lists must be descending, positive and at least n_ranks
/// long. n_ranks == 0 means observed.size().
ZkObjective zk_objective(std::span<const std::vector<double>> simulated, std::span<const double> observed,
                         std::size_t n_ranks = 0);

struct CalibrationOptions {
    std::size_t n_replicas = 100;
    std::size_t n_ranks = 1000;  // clipped to the observed list length
    unsigned workers = 0;        // 0: hardware concurrency
};

struct CurvePoint {
    double lambda = 0.0;
    double mse = 0.0;
};

struct CalibrationResult {
    double lambda_hat = 0.0;
    std::vector<CurvePoint> objective_curve;
    double epsilon = 0.0;
    double flux = 0.0;  // epsilon * lambda_hat, per year
    std::size_t n_replicas = 0;
    std::uint64_t seed = 0;
};

/// Simulated top lists for one lambda candidate.
struct ReplicaSet {
    double lambda = 0.0;
    std::vector<std::vector<double>> tops;
};

/// Runs n_replicas simulations per candidate. Replica r always uses
/// replica_seed(config.seed, r), so every candidate sees the same random
/// numbers. Output order follows `grid`, independent of the worker count.
std::vector<ReplicaSet> simulate_grid(const PrgParams& base, const SimConfig& config, std::span<const double> grid,
                                      const CalibrationOptions& opts);

/// Scores precomputed replica sets against `observed`; the argmin of the
/// curve wins, ties going to the smaller lambda.
CalibrationResult calibrate_against(std::span<const ReplicaSet> sets, std::span<const double> observed,
                                    double epsilon, std::uint64_t seed, std::size_t n_ranks);

/// simulate_grid followed by calibrate_against. base.lambda is ignored.
CalibrationResult calibrate_lambda(const PrgParams& base, const SimConfig& config, std::span<const double> observed,
                                   std::span<const double> grid, const CalibrationOptions& opts = {});

struct FluxPoint {
    double epsilon = 0.0;
    double lambda_hat = 0.0;
    double flux = 0.0;
};

enum class GridUnits {
    lambda,  // candidates are shedding rates, shared by every epsilon
    flux,    // candidates are epsilon * lambda; each epsilon gets grid / epsilon
};

/// Calibrates lambda separately for each epsilon in (0, 0.1].
std::vector<FluxPoint> flux_scan(const PrgParams& base, const SimConfig& config, std::span<const double> observed,
                                 std::span<const double> epsilons, std::span<const double> grid,
                                 const CalibrationOptions& opts = {}, GridUnits units = GridUnits::lambda);

} // namespace shadowtail
