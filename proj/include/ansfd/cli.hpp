#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ansfd::cli {

/// Exit statuses of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,  // unknown problem, unparsable scheme or flags, bad bracket
  kDiverged = 3,
};

/// Runs one invocation. `args` excludes the program name; `out` receives data
/// written to `--output -` (the default), `err` receives diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ansfd::cli
