#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liesect::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,  ///< some check has a non-empty failure list
  kExitConfigError = 2,         ///< invalid input
  kExitNumericalError = 3,      ///< the solver failed
};

/// Runs one liesect subcommand. `args` excludes the program name. Text goes to
/// `out`; errors are a single line on `err`; JSON goes to --output if given.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace liesect::cli
