#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lfp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

/// Entry point behind the `lfp` binary. `args` excludes the program name.
/// Prints one JSON summary line to `out` on success and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lfp::cli
