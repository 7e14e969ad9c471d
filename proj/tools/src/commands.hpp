#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ogsd::cli {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

/// Runs the command line `args` (without the program name), writing
/// progress to `out` and diagnostics to `err`. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ogsd::cli
