#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shadowtail/calibrate.hpp"
#include "shadowtail/csv.hpp"
#include "shadowtail/dataset.hpp"
#include "shadowtail/error.hpp"
#include "shadowtail/io.hpp"
#include "shadowtail/kernelreg.hpp"
#include "shadowtail/prgsim.hpp"
#include "shadowtail/sbindex.hpp"
#include "shadowtail/tailfit.hpp"

namespace shadowtail::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kModule = "cli";
constexpr double kBillionsPerTrillion = 1000.0;

// Flags shared by every subcommand.
struct Common {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    std::string classifier_path;
    bool strict = false;
};

struct Run {
    std::string command;
    Common common;
    std::vector<std::string> inputs;
    json params = json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> written;
};

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (std::uint64_t{rd()} << 32) ^ std::uint64_t{rd()};
}

// Flag, then an explicit seed inside a config document, then a fresh one.
std::uint64_t resolve_seed(const Common& c, std::optional<std::uint64_t> from_config = std::nullopt) {
    if (c.seed) return *c.seed;
    if (from_config) return *from_config;
    return fresh_seed();
}

fs::path out_path(const Run& run, const std::string& name) { return fs::path(run.common.out_dir) / name; }

std::ofstream open_out(Run& run, const std::string& name) {
    fs::create_directories(run.common.out_dir);
    const fs::path p = out_path(run, name);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(kModule, "cannot write " + p.string());
    run.written.push_back(p.string());
    return f;
}

void write_json(Run& run, const std::string& name, const json& j) {
    auto f = open_out(run, name);
    f << j.dump(2) << '\n';
}

void write_manifest(Run& run) {
    json m{{"command", run.command},
           {"inputs", run.inputs},
           {"params", run.params},
           {"seed", run.seed},
           {"tool_version", kToolVersion},
           {"dry_run", run.common.dry_run},
           {"outputs", run.written},
           {"timestamp", utc_timestamp()}};
    fs::create_directories(run.common.out_dir);
    std::ofstream f(out_path(run, run.command + ".manifest.json"), std::ios::binary);
    if (!f) throw Error(kModule, "cannot write manifest in " + run.common.out_dir);
    f << m.dump(2) << '\n';
}

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) throw Error(kModule, "input file not found: " + path);
}

// Year from the file stem when it is all digits (e.g. data/2013.csv).
int infer_year(const std::string& path, std::optional<int> given) {
    if (given) return *given;
    const std::string stem = fs::path(path).stem().string();
    if (!stem.empty() && stem.size() <= 4 && std::all_of(stem.begin(), stem.end(), ::isdigit)) return std::stoi(stem);
    return 0;
}

SectorClassifier make_classifier(const Common& c) {
    SectorClassifier cls = c.classifier_path.empty() ? SectorClassifier::forbes_default()
                                                     : SectorClassifier::from_file(c.classifier_path);
    cls.strict(c.strict);
    return cls;
}

Snapshot load(const std::string& path, int year, Run& run, std::ostream& err) {
    require_file(path);
    run.inputs.push_back(path);
    LoadReport rep = load_snapshot(path, year);
    if (rep.rejected_rows > 0) {
        err << path << ": " << rep.rejected_rows << " row(s) rejected\n";
        for (const auto& d : rep.diagnostics) err << "  " << d << '\n';
    }
    return std::move(rep.snapshot);
}

Snapshot select_sector(const Snapshot& s, const std::string& sector, const Common& c) {
    const SectorClassifier cls = make_classifier(c);
    if (sector == "all") {
        if (cls.is_strict())
            for (const auto& f : s.firms()) cls.classify(f.industry);
        return s;
    }
    return sector_subset(s, cls, sector == "financial" ? Sector::financial : Sector::non_financial);
}

struct FitOutcome {
    ParetoFit fit;
    std::vector<CcdfPoint> ccdf;
    bool suggested = false;
};

FitOutcome fit_snapshot(const Snapshot& s, std::optional<double> smin, std::optional<double> smax) {
    FitOutcome o;
    const auto assets = s.ranked_assets();
    o.ccdf = empirical_ccdf(assets);
    FitRange r{};
    if (!smin || !smax) {
        r = suggest_range(o.ccdf);
        o.suggested = true;
    }
    if (smin) r.s_minus = *smin;
    if (smax) r.s_plus = *smax;
    if (!(r.s_minus > 0.0) || !(r.s_plus > r.s_minus))
        throw Error(kModule, "invalid fit range: need 0 < smin < smax");
    o.fit = fit_pareto(o.ccdf, r.s_minus, r.s_plus);
    return o;
}

std::vector<double> parse_list(const std::string& spec, const std::string& what) {
    std::vector<double> out;
    for (const auto& field : csv::split_line(spec)) {
        auto v = csv::parse_double(csv::trim(field));
        if (!v) throw Error(kModule, "invalid " + what + " value '" + field + "'");
        out.push_back(*v);
    }
    if (out.empty()) throw Error(kModule, "empty " + what);
    return out;
}

// "start:stop:step" (inclusive) or a comma list.
std::vector<double> parse_grid(const std::string& spec) {
    if (spec.find(':') == std::string::npos) return parse_list(spec, "grid");
    std::vector<double> parts;
    std::string cur;
    std::istringstream ss(spec);
    while (std::getline(ss, cur, ':')) {
        auto v = csv::parse_double(csv::trim(cur));
        if (!v) throw Error(kModule, "invalid grid '" + spec + "'");
        parts.push_back(*v);
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
        throw Error(kModule, "invalid grid '" + spec + "', expected start:stop:step");
    const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    std::vector<double> g;
    for (std::size_t i = 0; i <= n; ++i) g.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return g;
}

std::vector<double> load_observed(const std::string& path, Run& run, std::ostream& err) {
    require_file(path);
    std::ifstream f(path, std::ios::binary);
    std::string head;
    std::getline(f, head);
    if (csv::trim(head).rfind("rank,size", 0) == 0) {
        run.inputs.push_back(path);
        f.seekg(0);
        return io::read_sizes_csv(f);
    }
    return load(path, infer_year(path, std::nullopt), run, err).ranked_assets();
}

io::SimDocument load_config(const std::string& path, Run& run, std::optional<std::uint64_t>* config_seed) {
    require_file(path);
    run.inputs.push_back(path);
    std::ifstream f(path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw Error(kModule, "config " + path + " is not valid JSON: " + e.what());
    }
    if (config_seed && j.contains("sim") && j["sim"].contains("seed")) *config_seed = j["sim"]["seed"].get<std::uint64_t>();
    auto doc = io::sim_document_from_json(j);
    doc.params.validate();
    doc.sim.validate();
    return doc;
}

std::string eps_tag(double eps) {
    std::string s = csv::format12(eps);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

json null_or(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::optional<double> smin, smax;
    std::optional<int> year;
    std::string sector = "all";
};

void run_fit(Run& run, const FitArgs& a, std::ostream& out, std::ostream& err) {
    run.params = {{"input", a.input}, {"smin", null_or(a.smin)}, {"smax", null_or(a.smax)}, {"sector", a.sector}};
    run.seed = resolve_seed(run.common);
    const int year = infer_year(a.input, a.year);
    const Snapshot s = select_sector(load(a.input, year, run, err), a.sector, run.common);
    if (run.common.dry_run) return;
    const FitOutcome o = fit_snapshot(s, a.smin, a.smax);
    json j = io::to_json(o.fit);
    j["list_year"] = year;
    j["sector"] = a.sector;
    j["range_source"] = o.suggested ? "suggested" : "given";
    write_json(run, "fit.json", j);
    auto f = open_out(run, "ccdf.csv");
    io::write_ccdf_csv(f, o.ccdf);
    out << j.dump(2) << '\n';
}

struct IndexArgs : FitArgs {
    std::size_t ntop = 1000;
};

void run_index(Run& run, const IndexArgs& a, std::ostream& out, std::ostream& err) {
    run.params = {{"input", a.input}, {"smin", null_or(a.smin)}, {"smax", null_or(a.smax)},
                  {"sector", a.sector}, {"ntop", a.ntop}};
    run.seed = resolve_seed(run.common);
    const int year = infer_year(a.input, a.year);
    const Snapshot s = select_sector(load(a.input, year, run, err), a.sector, run.common);
    if (run.common.dry_run) return;
    const FitOutcome o = fit_snapshot(s, a.smin, a.smax);
    const SbIndexResult r = compute_index(s, o.fit, a.ntop);
    json j{{"list_year", year},
           {"sector", a.sector},
           {"gamma_hat", o.fit.gamma_hat},
           {"n_top", r.n_top},
           {"units", "trillion USD"},
           {"i_sb", r.i_sb / kBillionsPerTrillion},
           {"band_low", r.band_low / kBillionsPerTrillion},
           {"band_high", r.band_high / kBillionsPerTrillion},
           {"fit", io::to_json(o.fit)}};
    write_json(run, "index.json", j);
    auto f = open_out(run, "index_ranks.csv");
    io::write_rank_gaps_csv(f, r.per_rank_gap);
    out << j.dump(2) << '\n';
}

struct SimulateArgs {
    std::string config;
};

void run_simulate(Run& run, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    run.params = {{"config", a.config}};
    std::optional<std::uint64_t> cseed;
    io::SimDocument doc = load_config(a.config, run, &cseed);
    run.seed = resolve_seed(run.common, cseed);
    doc.sim.seed = run.seed;
    run.params["resolved"] = io::to_json(doc);
    for (const auto& w : doc.sim.warnings(doc.params)) err << "warning: " << w << '\n';
    if (run.common.dry_run) return;
    const SimResult r = simulate(doc.params, doc.sim);
    auto f = open_out(run, "sizes.csv");
    io::write_sizes_csv(f, r.sizes_top);
    json j{{"population", r.population},
           {"shed_total", r.shed_total},
           {"entries", r.n_events.entries},
           {"exits", r.n_events.exits},
           {"sheddings", r.n_events.sheddings},
           {"n_top", r.sizes_top.size()},
           {"gamma_theory", doc.params.sigma > 0.0 ? json(gamma_from_params(doc.params.geometric_mu(), doc.params.sigma,
                                                                            doc.params.h))
                                                   : json(nullptr)}};
    write_json(run, "simulate.json", j);
    out << j.dump(2) << '\n';
}

struct CalibrateArgs {
    std::string observed;
    std::string config;
    std::string grid = "0:30:1";
    std::string grid_units = "lambda";
    std::size_t replicas = 100;
    std::string epsilon;
    std::size_t ntop = 1000;
    unsigned workers = 0;
};

void run_calibrate(Run& run, const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
    run.params = {{"observed", a.observed}, {"config", a.config},   {"grid", a.grid},
                  {"grid_units", a.grid_units}, {"replicas", a.replicas}, {"epsilon", a.epsilon},
                  {"ntop", a.ntop}};
    std::optional<std::uint64_t> cseed;
    io::SimDocument doc = load_config(a.config, run, &cseed);
    run.seed = resolve_seed(run.common, cseed);
    doc.sim.seed = run.seed;
    const std::vector<double> observed = load_observed(a.observed, run, err);
    const std::vector<double> grid = parse_grid(a.grid);
    const std::vector<double> eps = a.epsilon.empty() ? std::vector<double>{doc.params.epsilon}
                                                      : parse_list(a.epsilon, "epsilon");
    for (double e : eps)
        if (!(e > 0.0 && e <= 0.1)) throw Error(kModule, "epsilon must lie in (0, 0.1], got " + csv::format12(e));
    if (a.replicas == 0) throw Error(kModule, "--replicas must be positive");
    const bool flux_units = a.grid_units == "flux";
    for (const auto& w : doc.sim.warnings(doc.params)) err << "warning: " << w << '\n';
    if (run.common.dry_run) return;

    CalibrationOptions opts;
    opts.n_replicas = a.replicas;
    opts.n_ranks = a.ntop;
    opts.workers = a.workers;
    json runs = json::array();
    json scan = json::array();
    for (double e : eps) {
        PrgParams p = doc.params;
        p.epsilon = e;
        std::vector<double> g = grid;
        if (flux_units)
            for (double& x : g) x /= e;
        const CalibrationResult r = calibrate_lambda(p, doc.sim, observed, g, opts);
        runs.push_back(io::to_json(r));
        scan.push_back({{"epsilon", e}, {"lambda_hat", r.lambda_hat}, {"flux", r.flux}});
        auto f = open_out(run, eps.size() == 1 ? "objective.csv" : "objective_eps" + eps_tag(e) + ".csv");
        io::write_objective_csv(f, r.objective_curve);
    }
    json j = eps.size() == 1 ? runs[0] : json{{"runs", runs}, {"flux_scan", scan}};
    write_json(run, "calibration.json", j);
    out << (eps.size() == 1 ? j : scan).dump(2) << '\n';
}

struct RegressArgs {
    std::string input;
    std::string next;
    std::optional<int> year;
    std::string sector = "all";
    std::string bandwidth = "auto";
    std::size_t grid_size = 100;
};

void run_regress(Run& run, const RegressArgs& a, std::ostream& out, std::ostream& err) {
    run.params = {{"input", a.input},         {"next", a.next},          {"sector", a.sector},
                  {"bandwidth", a.bandwidth}, {"grid_size", a.grid_size}};
    run.seed = resolve_seed(run.common);
    std::optional<double> bw;
    if (a.bandwidth != "auto") {
        bw = csv::parse_double(a.bandwidth);
        if (!bw || !(*bw > 0.0)) throw Error(kModule, "--bandwidth must be 'auto' or a positive number");
    }
    if (a.grid_size < 2) throw Error(kModule, "--grid-size must be at least 2");
    const int year = infer_year(a.input, a.year);
    const Snapshot s = select_sector(load(a.input, year, run, err), a.sector, run.common);
    std::optional<Snapshot> next;
    if (!a.next.empty())
        next = select_sector(load(a.next, infer_year(a.next, std::nullopt), run, err), a.sector, run.common);
    if (run.common.dry_run) return;

    std::vector<XYPoint> pts;
    if (next) {
        pts = growth_pairs(s, *next);
    } else {
        RoaPoints roa = returns_on_assets(s);
        if (roa.dropped > 0) err << roa.dropped << " firm(s) without profits skipped\n";
        pts = std::move(roa.points);
    }
    const RegressionCurve c = nw_regress(pts, bw, a.grid_size);
    auto f = open_out(run, "curve.csv");
    io::write_curve_csv(f, c);
    out << json{{"bandwidth", c.bandwidth}, {"n_points", pts.size()}, {"grid_size", c.grid.size()}}.dump(2) << '\n';
}

struct RankplotArgs {
    std::string input;
    std::optional<int> year;
    std::optional<double> smin, smax;
};

void run_rankplot(Run& run, const RankplotArgs& a, std::ostream& out, std::ostream& err) {
    run.params = {{"input", a.input}, {"smin", null_or(a.smin)}, {"smax", null_or(a.smax)}};
    run.seed = resolve_seed(run.common);
    const int year = infer_year(a.input, a.year);
    const Snapshot s = load(a.input, year, run, err);
    const SectorClassifier cls = make_classifier(run.common);
    const auto ranked = s.ranked();
    for (const auto& f : ranked) cls.classify(f.industry);  // surfaces strict-mode errors in dry runs too
    if (run.common.dry_run) return;

    std::vector<double> line;
    if (a.smin || a.smax) {
        const FitOutcome o = fit_snapshot(s, a.smin, a.smax);
        line = theoretical_sizes(o.fit, ranked.size());
    }
    auto f = open_out(run, "rankplot.csv");
    f << "rank,name,industry,sector,assets" << (line.empty() ? "" : ",theoretical") << '\n';
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& r = ranked[i];
        f << (i + 1) << ',' << csv::quote(r.name) << ',' << csv::quote(r.industry) << ','
          << to_string(cls.classify(r.industry)) << ',' << csv::format12(r.assets);
        if (!line.empty()) f << ',' << csv::format12(line[i]);
        f << '\n';
    }
    const SectorSummary sum = sector_summary(s, cls);
    out << json{{"n_firms", ranked.size()}, {"financial_count", sum.financial.count},
                {"financial_asset_share", sum.asset_share}}
               .dump(2)
        << '\n';
}

struct SeriesArgs {
    std::string list;
    std::string compare;
    std::size_t ntop = 1000;
};

struct SeriesEntry {
    int list_year = 0;
    std::string path;
    std::optional<double> smin, smax;
};

std::vector<SeriesEntry> read_series_list(const std::string& path) {
    std::ifstream f(path);
    std::string line;
    if (!std::getline(f, line)) throw Error(kModule, "empty series list " + path);
    const auto head = csv::split_line(line);
    if (head.size() < 2 || csv::trim(head[0]) != "list_year" || csv::trim(head[1]) != "path")
        throw Error(kModule, "series list must start with 'list_year,path[,s_minus,s_plus]'");
    const fs::path base = fs::path(path).parent_path();
    std::vector<SeriesEntry> out;
    std::size_t line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split_line(line);
        SeriesEntry e;
        auto y = csv::parse_double(cells.empty() ? "" : csv::trim(cells[0]));
        if (!y || cells.size() < 2 || csv::trim(cells[1]).empty())
            throw Error(kModule, "bad series row at line " + std::to_string(line_no));
        e.list_year = static_cast<int>(*y);
        fs::path p = csv::trim(cells[1]);
        e.path = (p.is_relative() ? base / p : p).string();
        if (cells.size() > 2) e.smin = csv::parse_double(csv::trim(cells[2]));
        if (cells.size() > 3) e.smax = csv::parse_double(csv::trim(cells[3]));
        out.push_back(std::move(e));
    }
    if (out.empty()) throw Error(kModule, "series list " + path + " has no rows");
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.list_year < y.list_year; });
    return out;
}

std::string cell(std::optional<double> v) { return v ? csv::format12(*v) : ""; }

void run_series(Run& run, const SeriesArgs& a, std::ostream& out, std::ostream& err) {
    run.params = {{"list", a.list}, {"compare", a.compare}, {"ntop", a.ntop}};
    run.seed = resolve_seed(run.common);
    require_file(a.list);
    run.inputs.push_back(a.list);
    const auto entries = read_series_list(a.list);
    std::map<int, double> compare;
    if (!a.compare.empty()) {
        require_file(a.compare);
        run.inputs.push_back(a.compare);
        std::ifstream f(a.compare);
        compare = io::read_comparison_series(f);
    }
    std::vector<Snapshot> snaps;
    for (const auto& e : entries) snaps.push_back(load(e.path, e.list_year, run, err));
    const SectorClassifier cls = make_classifier(run.common);
    if (run.common.dry_run) return;

    auto f = open_out(run, "series.csv");
    f << "list_year,data_year,gamma_hat,se_gamma,gamma_fin,se_gamma_fin,i_sb,band_low,band_high,compare\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Snapshot& s = snaps[i];
        const FitOutcome o = fit_snapshot(s, entries[i].smin, entries[i].smax);
        const SbIndexResult r = compute_index(s, o.fit, std::min(a.ntop, s.size()));
        std::optional<double> gfin, sefin;
        try {
            const Snapshot fin = sector_subset(s, cls, Sector::financial);
            const ParetoFit ff = fit_pareto(empirical_ccdf(fin.ranked_assets()), o.fit.s_minus, o.fit.s_plus);
            gfin = ff.gamma_hat;
            sefin = ff.se_gamma;
        } catch (const Error& e) {
            err << "list year " << s.list_year() << ": financial fit skipped (" << e.what() << ")\n";
        }
        std::optional<double> cmp;
        if (auto it = compare.find(s.data_year()); it != compare.end()) cmp = it->second;
        f << s.list_year() << ',' << s.data_year() << ',' << csv::format12(o.fit.gamma_hat) << ','
          << csv::format12(o.fit.se_gamma) << ',' << cell(gfin) << ',' << cell(sefin) << ','
          << csv::format12(r.i_sb / kBillionsPerTrillion) << ',' << csv::format12(r.band_low / kBillionsPerTrillion)
          << ',' << csv::format12(r.band_high / kBillionsPerTrillion) << ',' << cell(cmp) << '\n';
    }
    out << "series: " << entries.size() << " year(s)\n";
}

void print_error(std::ostream& err, const std::string& command, const std::string& module, const std::string& msg,
                 int code) {
    err << json{{"error", {{"command", command}, {"module", module}, {"message", msg}, {"exit_code", code}}}}.dump()
        << '\n';
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", c.seed, "Random seed (recorded in the manifest)");
    sub->add_flag("--dry-run", c.dry_run, "Validate inputs and write the manifest only");
    sub->add_option("--classifier", c.classifier_path, "Financial-industry list (one per line)");
    sub->add_flag("--strict", c.strict, "Reject industries the classifier does not know");
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interrupted power-law tails in firm-size data", "shadowtail"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kToolVersion);

    Run run;
    FitArgs fit;
    IndexArgs index;
    SimulateArgs sim;
    CalibrateArgs cal;
    RegressArgs reg;
    RankplotArgs rank;
    SeriesArgs series;
    const std::vector<std::string> sectors{"all", "financial", "non-financial"};

    auto* f = app.add_subcommand("fit", "Fit the Pareto exponent of a snapshot");
    f->add_option("input", fit.input, "Snapshot CSV")->required();
    f->add_option("--smin", fit.smin, "Lower end of the fit range (billions)");
    f->add_option("--smax", fit.smax, "Upper end of the fit range (billions)");
    f->add_option("--year", fit.year, "List year (default: file stem)");
    f->add_option("--sector", fit.sector)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* ix = app.add_subcommand("index", "Shadow-banking index of a snapshot");
    ix->add_option("input", index.input, "Snapshot CSV")->required();
    ix->add_option("--smin", index.smin);
    ix->add_option("--smax", index.smax);
    ix->add_option("--year", index.year);
    ix->add_option("--sector", index.sector)->check(CLI::IsMember(sectors))->capture_default_str();
    ix->add_option("--ntop", index.ntop, "Number of top ranks summed")->check(CLI::PositiveNumber)->capture_default_str();

    auto* sm = app.add_subcommand("simulate", "Run the growth model once");
    sm->add_option("--config", sim.config, "Parameter document (JSON)")->required();

    auto* cb = app.add_subcommand("calibrate", "Grid-calibrate the shedding rate");
    cb->add_option("observed", cal.observed, "Observed sizes: snapshot CSV or rank,size CSV")->required();
    cb->add_option("--config", cal.config, "Parameter document (JSON)")->required();
    cb->add_option("--grid", cal.grid, "start:stop:step or comma list")->capture_default_str();
    cb->add_option("--grid-units", cal.grid_units, "lambda, or flux (grid divided by each epsilon)")
        ->check(CLI::IsMember({"lambda", "flux"}))
        ->capture_default_str();
    cb->add_option("--replicas", cal.replicas)->capture_default_str();
    cb->add_option("--epsilon", cal.epsilon, "Comma list; several values run a flux scan");
    cb->add_option("--ntop", cal.ntop)->check(CLI::PositiveNumber)->capture_default_str();
    cb->add_option("--workers", cal.workers, "Worker threads (0: all cores)")->capture_default_str();

    auto* rg = app.add_subcommand("regress", "Kernel regression of returns on log assets");
    rg->add_option("input", reg.input, "Snapshot CSV")->required();
    rg->add_option("--next", reg.next, "Following year's snapshot: regress next log assets instead");
    rg->add_option("--year", reg.year);
    rg->add_option("--sector", reg.sector)->check(CLI::IsMember(sectors))->capture_default_str();
    rg->add_option("--bandwidth", reg.bandwidth, "'auto' (Silverman) or a positive number")->capture_default_str();
    rg->add_option("--grid-size", reg.grid_size)->capture_default_str();

    auto* rp = app.add_subcommand("rankplot", "Rank-size table with sector labels");
    rp->add_option("input", rank.input, "Snapshot CSV")->required();
    rp->add_option("--year", rank.year);
    rp->add_option("--smin", rank.smin, "With --smax, adds the fitted line");
    rp->add_option("--smax", rank.smax);

    auto* se = app.add_subcommand("series", "Exponent and index over several years");
    se->add_option("list", series.list, "CSV: list_year,path[,s_minus,s_plus]")->required();
    se->add_option("--compare", series.compare, "CSV: year,value_trillions");
    se->add_option("--ntop", series.ntop)->check(CLI::PositiveNumber)->capture_default_str();

    for (auto* sub : {f, ix, sm, cb, rg, rp, se}) add_common(sub, run.common);

    if (!args.empty() && !args[0].empty() && args[0][0] != '-' && app.get_subcommand_no_throw(args[0]) == nullptr) {
        print_error(err, args[0], kModule, "unknown subcommand '" + args[0] + "'", 2);
        return 2;
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string cmd = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
        print_error(err, cmd, kModule, e.what(), 2);
        return 2;
    }

    run.command = app.get_subcommands().front()->get_name();
    try {
        if (run.command == "fit") run_fit(run, fit, out, err);
        else if (run.command == "index") run_index(run, index, out, err);
        else if (run.command == "simulate") run_simulate(run, sim, out, err);
        else if (run.command == "calibrate") run_calibrate(run, cal, out, err);
        else if (run.command == "regress") run_regress(run, reg, out, err);
        else if (run.command == "rankplot") run_rankplot(run, rank, out, err);
        else if (run.command == "series") run_series(run, series, out, err);
        write_manifest(run);
    } catch (const Error& e) {
        print_error(err, run.command, e.module(), e.detail(), 1);
        return 1;
    } catch (const std::exception& e) {
        print_error(err, run.command, kModule, e.what(), 1);
        return 1;
    }
    return 0;
}

} // namespace shadowtail::cli
