#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tempheno::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDivergence = 3;

/// Runs the command line `args` (program name excluded) and returns the exit
/// code. Human-readable output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tempheno::cli
