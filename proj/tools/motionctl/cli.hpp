#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace motion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one motionctl invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime failure (one line on `err`), 2 on a usage error.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace motion::cli
