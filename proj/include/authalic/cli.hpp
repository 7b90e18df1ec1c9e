#pragma once

#include <ostream>

namespace authalic {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitValidation = 3,
  kExitNumeric = 4,
};

// Runs one command (parameterize, compare, register, generate). Messages go
// to `out` and `err`; the return value is the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace authalic
