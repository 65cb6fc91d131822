#pragma once

// Firm-year snapshots: CSV codec, validation, ranking and sector aggregates.
//
// Monetary fields are in billions of USD throughout the library.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shadowtail {

struct FirmRecord {
    std::string name;
    std::string industry;
    double assets = 0.0;
    std::optional<double> profits;
    std::optional<double> sales;
    std::optional<double> market_value;

    friend bool operator==(const FirmRecord&, const FirmRecord&) = default;
};

/// Descending assets, then name ascending (byte-wise) on ties.
bool ranks_before(const FirmRecord& a, const FirmRecord& b) noexcept;

/// All firms of one list year. The list year names the publication; the data
/// it carries refer to the year before. Immutable once built.
class Snapshot {
public:
    /// Throws shadowtail::Error if `firms` is empty or any record breaks the
    /// FirmRecord invariants (assets > 0, non-empty industry).
    Snapshot(int list_year, std::vector<FirmRecord> firms);

    int list_year() const noexcept { return list_year_; }
    int data_year() const noexcept { return list_year_ - 1; }
    std::size_t size() const noexcept { return firms_.size(); }
    std::span<const FirmRecord> firms() const noexcept { return firms_; }

    /// Records in rank order (see ranks_before).
    std::vector<FirmRecord> ranked() const;
    /// Assets in rank order.
    std::vector<double> ranked_assets() const;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;

private:
    int list_year_;
    std::vector<FirmRecord> firms_;
};

struct LoadReport {
    Snapshot snapshot;
    std::size_t rejected_rows = 0;
    std::vector<std::string> diagnostics;  // one line per rejected row
};

/// Header must start with `name,industry,assets,profits`; `sales` and
/// `market_value` may follow. Rows with missing, unparseable or non-positive
/// assets (or an empty industry) are rejected and counted.
LoadReport read_snapshot(std::istream& in, int list_year);
LoadReport load_snapshot(const std::filesystem::path& path, int list_year);

/// Writes all six columns; numbers use the shortest exact representation so
/// that read_snapshot(write_snapshot(s)) == s.
void write_snapshot(std::ostream& out, const Snapshot& s);

enum class Sector { financial, non_financial };

std::string_view to_string(Sector s) noexcept;

/// Maps industry strings to sectors. Matching ignores case and surrounding
/// whitespace. Industries outside the financial set are non-financial unless
/// the classifier is strict, in which case they must also appear in the
/// known non-financial set.
class SectorClassifier {
public:
    /// The thirteen Forbes Global 2000 financial industries.
    static SectorClassifier forbes_default();

    /// One financial industry per line. A line `[non-financial]` switches to
    /// listing known non-financial industries. Blank lines and `#` comments
    /// are skipped.
    static SectorClassifier from_file(const std::filesystem::path& path);
    static SectorClassifier from_stream(std::istream& in);

    SectorClassifier(std::set<std::string> financial, std::set<std::string> non_financial = {});

    SectorClassifier& strict(bool on) noexcept {
        strict_ = on;
        return *this;
    }
    bool is_strict() const noexcept { return strict_; }

    /// Throws shadowtail::Error in strict mode for an unknown industry.
    Sector classify(std::string_view industry) const;
    bool is_financial(std::string_view industry) const { return classify(industry) == Sector::financial; }

    const std::set<std::string>& financial_industries() const noexcept { return financial_; }

private:
    std::set<std::string> financial_;      // normalized keys
    std::set<std::string> non_financial_;  // normalized keys
    bool strict_ = false;
};

/// Restricts a snapshot to one sector. Throws if the subset is empty.
Snapshot sector_subset(const Snapshot& s, const SectorClassifier& c, Sector which);

struct SectorTotals {
    std::size_t count = 0;
    double assets = 0.0;
    double profits = 0.0;
    double sales = 0.0;
    double market_value = 0.0;
};

struct SectorSummary {
    SectorTotals financial;
    SectorTotals non_financial;
    SectorTotals total;  // field-wise financial + non_financial

    double count_share = 0.0;
    double asset_share = 0.0;
    double sales_share = 0.0;         // 0 when no firm reports sales
    double market_value_share = 0.0;  // 0 when no firm reports market value
    /// Only defined when both sector profit totals are non-negative, since
    /// losses would push a ratio outside [0, 1].
    std::optional<double> profit_share;
};

SectorSummary sector_summary(const Snapshot& s, const SectorClassifier& c);

} // namespace shadowtail
