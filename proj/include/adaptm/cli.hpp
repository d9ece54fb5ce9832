#pragma once

#include <iosfwd>

namespace adaptm {

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the adaptmreg command line tool. Results go to `out`
/// (unless written to files), diagnostics to `err` as single lines
/// "error: <validation|runtime>: <reason>".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adaptm
