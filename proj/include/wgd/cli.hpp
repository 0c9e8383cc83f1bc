#pragma once

#include <ostream>

namespace wgd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitInternal = 4;

/// Entry point of the `wgd` tool. Reports go to --out (JSON + text); the text
/// form (or the statistics line for `gen`) is echoed to `out`, diagnostics to
/// `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace wgd
