#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cphase::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kSweepFailed = 4 };

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cphase::cli
