#pragma once

// File formats shared by the CLI and tests: CSV tables (12 significant
// digits) and JSON documents (full double precision).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "shadowtail/calibrate.hpp"
#include "shadowtail/kernelreg.hpp"
#include "shadowtail/prgsim.hpp"
#include "shadowtail/sbindex.hpp"
#include "shadowtail/tailfit.hpp"

namespace shadowtail::io {

using nlohmann::json;

void write_ccdf_csv(std::ostream& out, std::span<const CcdfPoint> points);
json to_json(const ParetoFit& fit);

/// `rank,observed,theoretical,gap`
void write_rank_gaps_csv(std::ostream& out, std::span<const RankGap> gaps);

/// `rank,size`, descending.
void write_sizes_csv(std::ostream& out, std::span<const double> sizes);
/// Reads a `rank,size` table back, returning sizes in rank order.
std::vector<double> read_sizes_csv(std::istream& in);

/// Simulation document: {"params": {...}, "sim": {...}}. A missing
/// params.nu defaults to h * n_firms_init (stationary population).
struct SimDocument {
    PrgParams params;
    SimConfig sim;
};
SimDocument sim_document_from_json(const json& j);
json to_json(const SimDocument& doc);

json to_json(const CalibrationResult& r);
/// `lambda,mse`
void write_objective_csv(std::ostream& out, std::span<const CurvePoint> curve);

/// `x,estimate,low,high`
void write_curve_csv(std::ostream& out, const RegressionCurve& c);

/// `year,value_trillions` comparison series (e.g. published estimates).
std::map<int, double> read_comparison_series(std::istream& in);

} // namespace shadowtail::io
