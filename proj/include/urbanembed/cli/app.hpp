#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace urbanembed::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

/// Runs one command line (without the program name). Machine-readable
/// results go to `out`, progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace urbanembed::cli
