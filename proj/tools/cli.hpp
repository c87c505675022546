#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pseudopt::cli {

enum ExitCode : int { kOk = 0, kConfig = 1, kSolver = 2, kReality = 3 };

/// Runs the command line `args` (without the program name). Output files are
/// written only once every computation has succeeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count: PSEUDO_PT_THREADS if set, otherwise the hardware concurrency.
int worker_count();

}  // namespace pseudopt::cli
