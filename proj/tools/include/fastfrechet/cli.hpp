#pragma once

#include <iosfwd>

namespace fastfrechet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

/// Parses argv and runs one subcommand. Results go to `out` unless an output
/// path is given; diagnostics and errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fastfrechet::cli
