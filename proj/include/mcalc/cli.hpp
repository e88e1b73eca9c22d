#pragma once

#include <ostream>

namespace mcalc {

/// Runs one `mcalc` subcommand. Returns 0 on success, 2 when a hypothesis or
/// precondition of the requested operation fails, 1 on input, parse or I/O
/// errors. Diagnostics go to `err`; the report goes to `out` unless --out
/// names a file.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcalc
