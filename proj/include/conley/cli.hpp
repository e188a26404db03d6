#pragma once

#include <iosfwd>

namespace conley {

inline constexpr int kExitOk = 0;
inline constexpr int kExitClaimFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Subcommands: equilibria, thresholds, sweep, morse, index, symbols,
/// pitchfork-demo, report.  Results go to `out` unless --out names a file.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conley
