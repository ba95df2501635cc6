#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qgrom::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kConfig = 1, kIo = 2, kNumerical = 3 };

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Subcommands: fom, pod, rom-gp, train, predict, analyze.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qgrom::cli
