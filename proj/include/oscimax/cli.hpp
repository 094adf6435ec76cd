#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oscimax::cli {

inline constexpr const char* kToolVersion = "oscimax 0.1.0";

/// Exit codes: 0 success, 2 usage or validation error, 3 numeric budget exhausted.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitBudget = 3;

/// Runs one subcommand. args excludes the program name. CSV goes to --out or to
/// `out`; a manifest is written next to --out. Diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Seventeen significant digits ("%.17g"), which read back to the same double.
std::string format_double(double v);

}  // namespace oscimax::cli
