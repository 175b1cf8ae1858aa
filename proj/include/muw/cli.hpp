#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace muw {

/// Exit codes: 0 success, 1 usage error, 2 data or model error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs the `muw` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace muw
