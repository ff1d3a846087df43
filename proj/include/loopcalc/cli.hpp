#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace loopcalc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInputError = 2;

/// Entry point of the `loopcalc` tool. `args` excludes the program name.
/// Returns 0 on success, 1 when verification fails, 2 on any input error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace loopcalc::cli
