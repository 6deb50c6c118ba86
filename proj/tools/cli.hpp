#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpcp::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2, kConditionFailed = 3 };

/// Parses `args` (args[0] is the program name), runs the subcommand and
/// returns its exit code. Normal output goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpcp::cli
