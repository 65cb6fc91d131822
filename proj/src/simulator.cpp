// Event-driven implementation of the stepped growth/exit/entry/shedding
// scheme.
//
// The per-step log increments are Gaussian and independent across firms, so
// k consecutive steps collapse into a single N(k m dt, k sigma^2 dt) draw and
// each firm only needs to be sampled when its value matters: at a shedding
// event (to find the leader) and at the end. Exit times are drawn once per
// firm as geometric step counts, which is the same law as a per-step
// Bernoulli(h dt) exit.
//
// At a shedding event the firms already being tracked ("candidates") are
// advanced exactly. Every other firm sits in a group synced at a common step
// and sorted by log-size, and is only sampled when its
// kPruneSigmas-standard-deviation upper bound reaches the current leader.
// A firm left unsampled that would actually have led has probability below
// 1e-15 per check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "shadowtail/error.hpp"
#include "shadowtail/prgsim.hpp"

namespace shadowtail {

namespace {

constexpr const char* kModule = "prgsim";
constexpr double kPruneSigmas = 8.0;
constexpr std::size_t kCandidateSoftLimit = 64;
constexpr std::size_t kMaxGroups = 64;
constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

struct Firm {
    std::uint64_t id = 0;
    double x = 0.0;            // log-size at the end of step `synced`
    std::int64_t synced = 0;
    std::int64_t death = kNever;  // removed during this step's exit sub-step
};

bool higher(const Firm& a, const Firm& b) noexcept {
    if (a.x != b.x) return a.x > b.x;
    return a.id < b.id;
}

struct Group {
    std::int64_t synced = 0;
    std::vector<Firm> firms;  // sorted by `higher`
    std::size_t head = 0;
};

class Engine {
public:
    Engine(const PrgParams& p, const SimConfig& c)
        : params_(p), config_(c), rng_(c.seed), step_drift_(p.log_drift() * c.dt), step_sd_(p.sigma * std::sqrt(c.dt)),
          p_exit_(p.h * c.dt), p_shed_(p.lambda * c.dt), log_entry_(std::log(p.entry_size)),
          log_keep_(std::log1p(-p.epsilon)),
          demote_gap_(std::max(1.0, 0.5 * kPruneSigmas * p.sigma)) {}

    SimResult run();

private:
    void advance(Firm& f, std::int64_t step) {
        const std::int64_t k = step - f.synced;
        if (k > 0) {
            const double kk = static_cast<double>(k);
            f.x += step_drift_ * kk + step_sd_ * std::sqrt(kk) * normal_(rng_);
            f.synced = step;
        }
    }

    // Upper bound on the increment accumulated over k steps.
    double bump(std::int64_t k) const {
        const double kk = static_cast<double>(k);
        return step_drift_ * kk + kPruneSigmas * step_sd_ * std::sqrt(kk);
    }

    std::int64_t draw_death(std::int64_t born) {
        if (p_exit_ <= 0.0) return kNever;
        std::geometric_distribution<std::int64_t> g(p_exit_);
        return born + 1 + g(rng_);
    }

    std::int64_t draw_next_event(std::int64_t after) {
        if (p_shed_ <= 0.0) return kNever;
        std::geometric_distribution<std::int64_t> g(p_shed_);
        return after + 1 + g(rng_);
    }

    bool dead(const Firm& f, std::int64_t step) const { return f.death <= step; }

    void make_group(std::vector<Firm> firms, std::int64_t step) {
        if (firms.empty()) return;
        std::sort(firms.begin(), firms.end(), higher);
        groups_.push_back(Group{step, std::move(firms), 0});
    }

    void flush_entrants(std::int64_t step);
    void merge_groups(std::int64_t step);
    void shed(std::int64_t step);

    const PrgParams& params_;
    const SimConfig& config_;
    std::mt19937_64 rng_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};

    double step_drift_;
    double step_sd_;
    double p_exit_;
    double p_shed_;
    double log_entry_;
    double log_keep_;
    double demote_gap_;

    std::uint64_t next_id_ = 0;
    std::vector<Firm> candidates_;
    std::vector<Group> groups_;
    std::vector<Firm> entrants_;  // entry order, x == log_entry_

    SimResult result_;
};

void Engine::flush_entrants(std::int64_t step) {
    std::vector<Firm> alive;
    alive.reserve(entrants_.size());
    for (auto& f : entrants_) {
        if (dead(f, step)) {
            ++result_.n_events.exits;
            continue;
        }
        advance(f, step);
        alive.push_back(f);
    }
    entrants_.clear();
    make_group(std::move(alive), step);
}

void Engine::merge_groups(std::int64_t step) {
    std::vector<Firm> all;
    for (auto& g : groups_) {
        for (std::size_t i = g.head; i < g.firms.size(); ++i) {
            Firm& f = g.firms[i];
            if (dead(f, step)) {
                ++result_.n_events.exits;
                continue;
            }
            advance(f, step);
            all.push_back(f);
        }
    }
    groups_.clear();
    make_group(std::move(all), step);
}

void Engine::shed(std::int64_t step) {
    std::erase_if(candidates_, [&](const Firm& f) {
        if (!dead(f, step)) return false;
        ++result_.n_events.exits;
        return true;
    });

    // Sample the candidate with the highest last-known value first, then every
    // other one whose bound still reaches the running leader. Candidates left
    // unsampled keep their stale value and cannot be picked.
    double leader = -std::numeric_limits<double>::infinity();
    if (!candidates_.empty()) {
        auto first = std::max_element(candidates_.begin(), candidates_.end(),
                                       [](const Firm& a, const Firm& b) { return a.x < b.x; });
        advance(*first, step);
        leader = first->x;
        for (auto& f : candidates_) {
            if (f.synced == step || f.x + bump(step - f.synced) < leader) continue;
            advance(f, step);
            leader = std::max(leader, f.x);
        }
    }

    if (!entrants_.empty()) {
        // Same start value, different ages: bound the concave bump over the age span.
        const double kmin = static_cast<double>(step - entrants_.back().synced);
        const double kmax = static_cast<double>(step - entrants_.front().synced);
        double k = kmax;
        if (step_drift_ < 0.0) {
            const double peak = std::pow(kPruneSigmas * step_sd_ / (2.0 * -step_drift_), 2.0);
            k = std::clamp(peak, kmin, kmax);
        }
        const double ub = log_entry_ + step_drift_ * k + kPruneSigmas * step_sd_ * std::sqrt(k);
        if (ub >= leader) flush_entrants(step);
    }

    for (auto& g : groups_) {
        const double b = bump(step - g.synced);
        while (g.head < g.firms.size()) {
            Firm& f = g.firms[g.head];
            if (dead(f, step)) {
                ++result_.n_events.exits;
                ++g.head;
                continue;
            }
            if (f.x + b < leader) break;
            advance(f, step);
            leader = std::max(leader, f.x);
            candidates_.push_back(f);
            ++g.head;
        }
    }
    std::erase_if(groups_, [](const Group& g) { return g.head == g.firms.size(); });

    if (candidates_.empty()) return;  // nobody alive to shed from

    auto top = candidates_.end();
    for (auto it = candidates_.begin(); it != candidates_.end(); ++it)
        if (it->synced == step && (top == candidates_.end() || higher(*it, *top))) top = it;
    const double before = std::exp(top->x);
    top->x += log_keep_;
    const double after = std::exp(top->x);
    const double amount = before - after;
    result_.shed_total += amount;
    ++result_.n_events.sheddings;
    if (config_.record_events)
        result_.events.push_back(ShedEvent{static_cast<double>(step) * config_.dt, top->id, before, after, amount});

    if (candidates_.size() > kCandidateSoftLimit) {
        const double cut = leader - demote_gap_;
        std::vector<Firm> demoted;
        std::erase_if(candidates_, [&](Firm& f) {
            if (f.x + bump(step - f.synced) >= cut) return false;
            advance(f, step);
            demoted.push_back(f);
            return true;
        });
        make_group(std::move(demoted), step);
    }
    if (groups_.size() > kMaxGroups) merge_groups(step);
}

SimResult Engine::run() {
    const auto last_step = std::max<std::int64_t>(1, std::llround(config_.total_years() / config_.dt));

    std::vector<Firm> initial(config_.n_firms_init);
    for (auto& f : initial) f = Firm{next_id_++, log_entry_, 0, draw_death(0)};
    make_group(std::move(initial), 0);

    const double entry_mean = params_.nu * config_.dt;
    std::poisson_distribution<std::int64_t> arrivals(entry_mean > 0.0 ? entry_mean : 1.0);

    std::int64_t next_event = draw_next_event(0);
    for (std::int64_t s = 1; s <= last_step; ++s) {
        if (entry_mean > 0.0) {
            const std::int64_t n = arrivals(rng_);
            for (std::int64_t i = 0; i < n; ++i) entrants_.push_back(Firm{next_id_++, log_entry_, s, draw_death(s)});
            result_.n_events.entries += static_cast<std::uint64_t>(n);
        }
        if (s == next_event) {
            shed(s);
            next_event = draw_next_event(s);
        }
    }

    std::vector<double> xs;
    auto collect = [&](Firm& f) {
        if (dead(f, last_step)) {
            ++result_.n_events.exits;
            return;
        }
        advance(f, last_step);
        xs.push_back(f.x);
    };
    for (auto& f : candidates_) collect(f);
    for (auto& g : groups_)
        for (std::size_t i = g.head; i < g.firms.size(); ++i) collect(g.firms[i]);
    for (auto& f : entrants_) collect(f);

    if (xs.empty()) throw Error(kModule, "population extinct before horizon");
    result_.population = xs.size();
    const std::size_t keep = std::min(config_.keep_top, xs.size());
    std::partial_sort(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(keep), xs.end(), std::greater<>());
    result_.sizes_top.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) result_.sizes_top[i] = std::exp(xs[i]);
    return std::move(result_);
}

} // namespace

SimResult simulate(const PrgParams& params, const SimConfig& config) {
    params.validate();
    config.validate();
    if (params.h * config.dt > 0.5 || params.lambda * config.dt > 0.5)
        throw Error(kModule, "time step too coarse: h*dt and lambda*dt must not exceed 0.5");
    Engine engine(params, config);
    return engine.run();
}

} // namespace shadowtail
