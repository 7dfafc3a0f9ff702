#pragma once

#include <iosfwd>

namespace lfdd {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitNumericalError = 3 };

// Entry point of the `lfdd` executable: simulate | eigen | scenarios | check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lfdd
