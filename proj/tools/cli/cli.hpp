#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cuenet::cli {

/// Exit codes of every subcommand.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNumeric = 3,
};

/// Runs one `cuenet` invocation; `args` excludes the program name.
/// Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cuenet::cli
