#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hyperfit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitNumerical = 4,
};

/// Environment variable consulted when --threads is not given.
inline constexpr const char* kThreadsEnv = "HYPERFIT_THREADS";

/// Runs the `hyperfit` command line. `args` excludes the program name.
/// Never throws; failures are reported on `err` and mapped to an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "2..5" or "2,3,5" (ranges and items may be mixed: "1,3..5").
std::vector<int> parse_int_list(std::string_view text);
/// "0.1,0.2,0.4"
std::vector<double> parse_real_list(std::string_view text);

std::string_view tool_version();

}  // namespace hyperfit::cli
