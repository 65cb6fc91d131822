#include "shadowtail/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "shadowtail/csv.hpp"
#include "shadowtail/error.hpp"

namespace shadowtail {

namespace {

constexpr const char* kModule = "dataset";
constexpr std::array<std::string_view, 6> kColumns{"name", "industry", "assets", "profits", "sales", "market_value"};
constexpr std::size_t kRequiredColumns = 4;

std::string normalize_industry(std::string_view s) {
    std::string out = csv::trim(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void check_record(const FirmRecord& f) {
    if (!(f.assets > 0.0)) throw Error(kModule, "firm '" + f.name + "' has non-positive assets");
    if (csv::trim(f.industry).empty()) throw Error(kModule, "firm '" + f.name + "' has an empty industry");
}

std::size_t parse_header(std::string line) {
    // UTF-8 byte order mark
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto cols = csv::split_line(line);
    if (cols.size() < kRequiredColumns || cols.size() > kColumns.size())
        throw Error(kModule, "malformed header: expected name,industry,assets,profits[,sales[,market_value]]");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (normalize_industry(cols[i]) != kColumns[i])
            throw Error(kModule, "malformed header: column " + std::to_string(i + 1) + " is '" + cols[i] +
                                     "', expected '" + std::string(kColumns[i]) + "'");
    }
    return cols.size();
}

std::optional<double> optional_number(const std::vector<std::string>& fields, std::size_t i, bool& bad) {
    if (i >= fields.size() || csv::trim(fields[i]).empty()) return std::nullopt;
    auto v = csv::parse_double(fields[i]);
    if (!v) bad = true;
    return v;
}

} // namespace

bool ranks_before(const FirmRecord& a, const FirmRecord& b) noexcept {
    if (a.assets != b.assets) return a.assets > b.assets;
    return a.name < b.name;
}

Snapshot::Snapshot(int list_year, std::vector<FirmRecord> firms) : list_year_(list_year), firms_(std::move(firms)) {
    if (firms_.empty()) throw Error(kModule, "snapshot has no firms");
    for (const auto& f : firms_) check_record(f);
}

std::vector<FirmRecord> Snapshot::ranked() const {
    std::vector<FirmRecord> out(firms_.begin(), firms_.end());
    std::stable_sort(out.begin(), out.end(), ranks_before);
    return out;
}

std::vector<double> Snapshot::ranked_assets() const {
    std::vector<double> out;
    out.reserve(firms_.size());
    for (const auto& f : ranked()) out.push_back(f.assets);
    return out;
}

LoadReport read_snapshot(std::istream& in, int list_year) {
    std::string line;
    if (!std::getline(in, line)) throw Error(kModule, "malformed header: input is empty");
    const std::size_t n_cols = parse_header(line);

    std::vector<FirmRecord> firms;
    std::size_t rejected = 0;
    std::vector<std::string> diagnostics;
    std::size_t line_no = 1;
    auto reject = [&](const std::string& why) {
        ++rejected;
        diagnostics.push_back("line " + std::to_string(line_no) + ": " + why);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() < kRequiredColumns || fields.size() > n_cols) {
            reject("expected " + std::to_string(kRequiredColumns) + " to " + std::to_string(n_cols) + " fields, got " +
                   std::to_string(fields.size()));
            continue;
        }
        FirmRecord f;
        f.name = csv::trim(fields[0]);
        f.industry = csv::trim(fields[1]);
        const auto assets = csv::parse_double(fields[2]);
        if (!assets) {
            reject("missing or unparseable assets");
            continue;
        }
        if (*assets <= 0.0) {
            reject("non-positive assets");
            continue;
        }
        if (f.industry.empty()) {
            reject("empty industry");
            continue;
        }
        f.assets = *assets;
        bool bad = false;
        f.profits = optional_number(fields, 3, bad);
        f.sales = optional_number(fields, 4, bad);
        f.market_value = optional_number(fields, 5, bad);
        if (bad) {
            reject("unparseable numeric field");
            continue;
        }
        firms.push_back(std::move(f));
    }
    if (firms.empty()) throw Error(kModule, "zero valid rows");
    return LoadReport{Snapshot(list_year, std::move(firms)), rejected, std::move(diagnostics)};
}

LoadReport load_snapshot(const std::filesystem::path& path, int list_year) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open '" + path.string() + "'");
    return read_snapshot(in, list_year);
}

void write_snapshot(std::ostream& out, const Snapshot& s) {
    out << "name,industry,assets,profits,sales,market_value\n";
    auto opt = [](const std::optional<double>& v) { return v ? csv::format_exact(*v) : std::string(); };
    for (const auto& f : s.firms()) {
        out << csv::quote(f.name) << ',' << csv::quote(f.industry) << ',' << csv::format_exact(f.assets) << ','
            << opt(f.profits) << ',' << opt(f.sales) << ',' << opt(f.market_value) << '\n';
    }
}

std::string_view to_string(Sector s) noexcept {
    return s == Sector::financial ? "financial" : "non-financial";
}

SectorClassifier SectorClassifier::forbes_default() {
    return SectorClassifier({"Banking", "Diversified Financials", "Insurance", "Consumer Financial Services",
                             "Diversified Insurance", "Insurance Brokers", "Investment Services", "Major Banks",
                             "Regional Banks", "Rental & Leasing", "Life & Health Insurance",
                             "Thrifts & Mortgage Finance", "Property & Casualty Insurance"});
}

SectorClassifier::SectorClassifier(std::set<std::string> financial, std::set<std::string> non_financial) {
    for (const auto& s : financial) financial_.insert(normalize_industry(s));
    for (const auto& s : non_financial) non_financial_.insert(normalize_industry(s));
}

SectorClassifier SectorClassifier::from_stream(std::istream& in) {
    std::set<std::string> fin, nonfin;
    bool in_nonfin = false;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = csv::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (normalize_industry(t) == "[non-financial]") {
            in_nonfin = true;
            continue;
        }
        (in_nonfin ? nonfin : fin).insert(t);
    }
    if (fin.empty()) throw Error(kModule, "classifier file lists no financial industries");
    return SectorClassifier(std::move(fin), std::move(nonfin));
}

SectorClassifier SectorClassifier::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open classifier file '" + path.string() + "'");
    return from_stream(in);
}

Sector SectorClassifier::classify(std::string_view industry) const {
    const std::string key = normalize_industry(industry);
    if (financial_.count(key)) return Sector::financial;
    if (strict_ && !non_financial_.count(key))
        throw Error(kModule, "unknown industry '" + std::string(industry) + "' (strict classification)");
    return Sector::non_financial;
}

Snapshot sector_subset(const Snapshot& s, const SectorClassifier& c, Sector which) {
    std::vector<FirmRecord> out;
    for (const auto& f : s.firms())
        if (c.classify(f.industry) == which) out.push_back(f);
    if (out.empty()) throw Error(kModule, "no " + std::string(to_string(which)) + " firms in snapshot");
    return Snapshot(s.list_year(), std::move(out));
}

SectorSummary sector_summary(const Snapshot& s, const SectorClassifier& c) {
    SectorSummary r;
    for (const auto& f : s.firms()) {
        SectorTotals& t = c.classify(f.industry) == Sector::financial ? r.financial : r.non_financial;
        ++t.count;
        t.assets += f.assets;
        t.profits += f.profits.value_or(0.0);
        t.sales += f.sales.value_or(0.0);
        t.market_value += f.market_value.value_or(0.0);
    }
    r.total.count = r.financial.count + r.non_financial.count;
    r.total.assets = r.financial.assets + r.non_financial.assets;
    r.total.profits = r.financial.profits + r.non_financial.profits;
    r.total.sales = r.financial.sales + r.non_financial.sales;
    r.total.market_value = r.financial.market_value + r.non_financial.market_value;

    auto share = [](double part, double whole) { return whole > 0.0 ? part / whole : 0.0; };
    r.count_share = static_cast<double>(r.financial.count) / static_cast<double>(r.total.count);
    r.asset_share = share(r.financial.assets, r.total.assets);
    r.sales_share = share(r.financial.sales, r.total.sales);
    r.market_value_share = share(r.financial.market_value, r.total.market_value);
    if (r.financial.profits >= 0.0 && r.non_financial.profits >= 0.0)
        r.profit_share = share(r.financial.profits, r.total.profits);
    return r;
}

} // namespace shadowtail
