#pragma once

#include <iosfwd>

namespace feeddrive {

/// Entry point behind main(): parses argv, dispatches the subcommand, and
/// reports through the given streams. Returns the process exit code:
/// 0 success, 1 domain failure (flagged catalog rows, diverged simulation,
/// budget too small, ...), 2 usage or config errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace feeddrive
