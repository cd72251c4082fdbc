#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace topotrace::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kSafetyStop = 3,
};

/// Runs the command line `args` (args[0] is the program name). Machine
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topotrace::cli
