#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nfer::cli {

/// Exit codes.
inline constexpr int kFound = 0;     // target found / SAT / accepted
inline constexpr int kNotFound = 1;  // not found / UNSAT / rejected
inline constexpr int kFailure = 2;   // usage, parse or validation error
inline constexpr int kUnknown = 3;   // bounded search exhausted

/// Runs `nfer-df` with `args` (program name excluded).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nfer::cli
