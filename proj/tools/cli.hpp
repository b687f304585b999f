#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smsn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `smsn` command line with `args` (program name excluded).
/// Data goes to `out`, diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace smsn::cli
