#pragma once

#include <iosfwd>

namespace whf {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitClean = 0,
  kExitFlagged = 1,     // result produced, but a rank decision was ambiguous
  kExitValidation = 2,  // bad input, bad flags, unwritable output
  kExitNumerical = 3,   // a pipeline stage or a verification check failed
};

/// Entry point of the `whf` tool; writes normal output to `out` and
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace whf
