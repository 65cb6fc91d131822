#include "shadowtail/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "shadowtail/csv.hpp"
#include "shadowtail/error.hpp"

namespace shadowtail::io {

namespace {

constexpr const char* kModule = "io";

void expect_header(std::istream& in, const std::string& expected) {
    std::string line;
    if (!std::getline(in, line)) throw Error(kModule, "empty input, expected header '" + expected + "'");
    if (csv::trim(line) != expected) throw Error(kModule, "malformed header '" + csv::trim(line) + "', expected '" + expected + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

} // namespace

void write_ccdf_csv(std::ostream& out, std::span<const CcdfPoint> points) {
    out << "size,ccdf,rank\n";
    for (const auto& p : points) out << csv::format12(p.size) << ',' << csv::format12(p.ccdf) << ',' << p.rank << '\n';
}

json to_json(const ParetoFit& fit) {
    return json{{"gamma_hat", fit.gamma_hat},   {"log_c_hat", fit.log_c_hat}, {"c_hat", std::exp(fit.log_c_hat)},
                {"s_minus", fit.s_minus},       {"s_plus", fit.s_plus},       {"se_gamma", fit.se_gamma},
                {"se_log_c", fit.se_log_c},     {"residual_rms", fit.residual_rms},
                {"n_points", fit.n_points},     {"m_total", fit.m_total}};
}

void write_rank_gaps_csv(std::ostream& out, std::span<const RankGap> gaps) {
    out << "rank,observed,theoretical,gap\n";
    for (const auto& g : gaps)
        out << g.rank << ',' << csv::format12(g.observed) << ',' << csv::format12(g.theoretical) << ','
            << csv::format12(g.theoretical - g.observed) << '\n';
}

void write_sizes_csv(std::ostream& out, std::span<const double> sizes) {
    out << "rank,size\n";
    for (std::size_t k = 0; k < sizes.size(); ++k) out << (k + 1) << ',' << csv::format12(sizes[k]) << '\n';
}

std::vector<double> read_sizes_csv(std::istream& in) {
    expect_header(in, "rank,size");
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split_line(line);
        const auto rank = f.size() == 2 ? csv::parse_double(f[0]) : std::nullopt;
        const auto size = f.size() == 2 ? csv::parse_double(f[1]) : std::nullopt;
        if (!rank || !size || *rank != static_cast<double>(out.size() + 1) || !(*size > 0.0))
            throw Error(kModule, "bad size row at line " + std::to_string(line_no));
        if (!out.empty() && *size > out.back()) throw Error(kModule, "sizes are not descending at line " + std::to_string(line_no));
        out.push_back(*size);
    }
    if (out.empty()) throw Error(kModule, "size table has no rows");
    return out;
}

SimDocument sim_document_from_json(const json& j) {
    try {
        SimDocument d;
        const json p = j.value("params", json::object());
        const json s = j.value("sim", json::object());
        d.sim.n_firms_init = get_or<std::size_t>(s, "n_firms_init", d.sim.n_firms_init);
        d.sim.dt = get_or(s, "dt", d.sim.dt);
        d.sim.burn_in = get_or(s, "burn_in", d.sim.burn_in);
        d.sim.horizon = get_or(s, "horizon", d.sim.horizon);
        d.sim.seed = get_or<std::uint64_t>(s, "seed", d.sim.seed);
        d.sim.keep_top = get_or<std::size_t>(s, "keep_top", d.sim.keep_top);

        d.params.mu = p.at("mu").get<double>();
        d.params.sigma = p.at("sigma").get<double>();
        d.params.h = p.at("h").get<double>();
        d.params.lambda = get_or(p, "lambda", 0.0);
        d.params.epsilon = get_or(p, "epsilon", d.params.epsilon);
        d.params.entry_size = get_or(p, "entry_size", d.params.entry_size);
        d.params.drift = drift_convention_from_string(get_or<std::string>(p, "drift_convention", "geometric"));
        d.params.nu = p.contains("nu") ? p.at("nu").get<double>()
                                       : d.params.h * static_cast<double>(d.sim.n_firms_init);
        return d;
    } catch (const json::exception& e) {
        throw Error(kModule, std::string("bad simulation document: ") + e.what());
    }
}

json to_json(const SimDocument& d) {
    return json{{"params",
                 {{"mu", d.params.mu},
                  {"sigma", d.params.sigma},
                  {"h", d.params.h},
                  {"nu", d.params.nu},
                  {"lambda", d.params.lambda},
                  {"epsilon", d.params.epsilon},
                  {"entry_size", d.params.entry_size},
                  {"drift_convention", to_string(d.params.drift)}}},
                {"sim",
                 {{"n_firms_init", d.sim.n_firms_init},
                  {"dt", d.sim.dt},
                  {"burn_in", d.sim.burn_in},
                  {"horizon", d.sim.horizon},
                  {"seed", d.sim.seed},
                  {"keep_top", d.sim.keep_top}}}};
}

json to_json(const CalibrationResult& r) {
    json curve = json::array();
    for (const auto& p : r.objective_curve) curve.push_back({{"lambda", p.lambda}, {"mse", p.mse}});
    return json{{"lambda_hat", r.lambda_hat}, {"epsilon", r.epsilon}, {"flux", r.flux},
                {"n_replicas", r.n_replicas}, {"seed", r.seed},       {"objective_curve", curve}};
}

void write_objective_csv(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "lambda,mse\n";
    for (const auto& p : curve) out << csv::format12(p.lambda) << ',' << csv::format12(p.mse) << '\n';
}

void write_curve_csv(std::ostream& out, const RegressionCurve& c) {
    out << "x,estimate,low,high\n";
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        out << csv::format12(c.grid[i]) << ',' << csv::format12(c.estimate[i]) << ',' << csv::format12(c.band_low[i])
            << ',' << csv::format12(c.band_high[i]) << '\n';
}

std::map<int, double> read_comparison_series(std::istream& in) {
    expect_header(in, "year,value_trillions");
    std::map<int, double> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split_line(line);
        const auto year = f.size() == 2 ? csv::parse_double(f[0]) : std::nullopt;
        const auto value = f.size() == 2 ? csv::parse_double(f[1]) : std::nullopt;
        if (!year || !value || *year != std::floor(*year))
            throw Error(kModule, "bad comparison row at line " + std::to_string(line_no));
        out[static_cast<int>(*year)] = *value;
    }
    return out;
}

} // namespace shadowtail::io
