#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netlqr {

/// Process exit codes of the `netlqr` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitChecksFailed = 1,  // also usage and I/O errors
  kExitValidation = 2,
  kExitArtifactMismatch = 3,
  kExitNumerical = 4,
};

/// Entry point of the command-line tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netlqr
