#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shadowtail::csv {

/// Splits one CSV record. Handles double-quoted fields with embedded commas
/// and doubled quotes. A trailing '\r' is ignored.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string quote(std::string_view field);

std::string trim(std::string_view s);

/// Strict full-string parse; nullopt for empty, partial or non-finite input.
std::optional<double> parse_double(std::string_view s);

/// Fixed 12-significant-digit rendering used by every CSV writer.
std::string format12(double v);

/// Shortest representation that parses back to the identical double.
std::string format_exact(double v);

} // namespace shadowtail::csv
