#include "shadowtail/calibrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "shadowtail/error.hpp"

namespace shadowtail {

namespace {

constexpr const char* kModule = "calibrate";

void check_ranked(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() < n)
        throw Error(kModule, std::string(what) + " has " + std::to_string(v.size()) + " entries, need " + std::to_string(n));
    for (std::size_t k = 0; k < n; ++k) {
        if (!(v[k] > 0.0)) throw Error(kModule, std::string(what) + " contains a non-positive size");
        if (k > 0 && v[k] > v[k - 1]) throw Error(kModule, std::string(what) + " is not sorted descending");
    }
}

std::string lambda_label(double lambda) {
    std::ostringstream os;
    os << lambda;
    return os.str();
}

} // namespace

ZkObjective zk_objective(std::span<const std::vector<double>> simulated, std::span<const double> observed,
                         std::size_t n_ranks) {
    if (simulated.empty()) throw Error(kModule, "no simulated replicas");
    const std::size_t n = n_ranks == 0 ? observed.size() : n_ranks;
    if (n == 0) throw Error(kModule, "empty observed list");
    check_ranked(observed, n, "observed list");
    for (const auto& rep : simulated) check_ranked(rep, n, "simulated replica");

    ZkObjective obj;
    obj.n_replicas = simulated.size();
    obj.z_k.assign(n, 0.0);
    // Replica-major accumulation: fixed summation order for reproducibility.
    for (const auto& rep : simulated)
        for (std::size_t k = 0; k < n; ++k) obj.z_k[k] += std::log(rep[k] / observed[k]);
    for (double& z : obj.z_k) z /= static_cast<double>(simulated.size());

    for (double z : obj.z_k) obj.z_bar += z;
    obj.z_bar /= static_cast<double>(n);
    for (double z : obj.z_k) obj.mse += (z - obj.z_bar) * (z - obj.z_bar);
    obj.mse /= static_cast<double>(n);
    return obj;
}

std::vector<ReplicaSet> simulate_grid(const PrgParams& base, const SimConfig& config, std::span<const double> grid,
                                      const CalibrationOptions& opts) {
    if (grid.empty()) throw Error(kModule, "empty lambda grid");
    if (opts.n_replicas == 0) throw Error(kModule, "n_replicas must be positive");
    for (double l : grid)
        if (!(l >= 0.0)) throw Error(kModule, "lambda candidates must be non-negative");

    std::vector<ReplicaSet> sets(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        sets[i].lambda = grid[i];
        sets[i].tops.resize(opts.n_replicas);
    }

    const std::size_t jobs = grid.size() * opts.n_replicas;
    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        while (!failed.load()) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) return;
            const std::size_t cand = job / opts.n_replicas;
            const std::size_t rep = job % opts.n_replicas;
            try {
                PrgParams p = base;
                p.lambda = grid[cand];
                SimConfig c = config;
                c.seed = replica_seed(config.seed, rep);
                c.record_events = false;
                sets[cand].tops[rep] = simulate(p, c).sizes_top;
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!failed.exchange(true))
                    error = std::make_exception_ptr(
                        Error(kModule, "simulation failed at lambda = " + lambda_label(grid[cand]) + ": " + e.what()));
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return sets;
}

CalibrationResult calibrate_against(std::span<const ReplicaSet> sets, std::span<const double> observed,
                                    double epsilon, std::uint64_t seed, std::size_t n_ranks) {
    if (sets.empty()) throw Error(kModule, "no candidates");
    const std::size_t n = std::min(n_ranks == 0 ? observed.size() : n_ranks, observed.size());

    CalibrationResult r;
    r.epsilon = epsilon;
    r.seed = seed;
    r.n_replicas = sets.front().tops.size();
    std::size_t best = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const double mse = zk_objective(sets[i].tops, observed, n).mse;
        r.objective_curve.push_back(CurvePoint{sets[i].lambda, mse});
        const auto& b = r.objective_curve[best];
        if (mse < b.mse || (mse == b.mse && sets[i].lambda < b.lambda)) best = i;
    }
    r.lambda_hat = r.objective_curve[best].lambda;
    r.flux = epsilon * r.lambda_hat;
    return r;
}

CalibrationResult calibrate_lambda(const PrgParams& base, const SimConfig& config, std::span<const double> observed,
                                   std::span<const double> grid, const CalibrationOptions& opts) {
    if (observed.empty()) throw Error(kModule, "empty observed list");
    const std::size_t n = std::min(opts.n_ranks, observed.size());
    check_ranked(observed, n, "observed list");
    const auto sets = simulate_grid(base, config, grid, opts);
    return calibrate_against(sets, observed, base.epsilon, config.seed, n);
}

std::vector<FluxPoint> flux_scan(const PrgParams& base, const SimConfig& config, std::span<const double> observed,
                                 std::span<const double> epsilons, std::span<const double> grid,
                                 const CalibrationOptions& opts, GridUnits units) {
    if (epsilons.empty()) throw Error(kModule, "no epsilon values");
    std::vector<FluxPoint> out;
    for (double eps : epsilons) {
        if (!(eps > 0.0 && eps <= 0.1)) throw Error(kModule, "epsilon values must lie in (0, 0.1]");
        PrgParams p = base;
        p.epsilon = eps;
        std::vector<double> lambdas(grid.begin(), grid.end());
        if (units == GridUnits::flux)
            for (double& l : lambdas) l /= eps;
        const auto r = calibrate_lambda(p, config, observed, lambdas, opts);
        out.push_back(FluxPoint{eps, r.lambda_hat, r.flux});
    }
    return out;
}

} // namespace shadowtail
