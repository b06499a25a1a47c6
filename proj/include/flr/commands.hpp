#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flr::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kDataError = 3,
  kNumericalFailure = 4,
};

// Parses argv (argv[0] is the program name) and runs the selected
// subcommand: synth, denoise, metrics, compare.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flr::cli
