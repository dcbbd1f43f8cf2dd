#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace selval {

// Exit statuses: 0 success, 1 validation or usage error, 2 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Runs the command line `args` (args[0] is the program name). Reports go to
// `out` unless redirected with --out; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace selval
