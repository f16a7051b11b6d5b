#pragma once

#include <iosfwd>

namespace frameward::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kNumerical = 3;

/// Parses argv, runs the subcommand and returns the exit status.  Records
/// go to --out (or `out`), usage text and progress lines to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace frameward::cli
