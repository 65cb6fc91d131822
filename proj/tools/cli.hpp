#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shadowtail::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (args exclude the program name). Returns the
/// process exit code: 0 on success, 1 when a module fails, 2 on bad usage.
/// Failures print a JSON error record to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace shadowtail::cli
