#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hybridiq::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;    // parse, IO, usage, or library errors
inline constexpr int kViolation = 2;  // validate / properties found a violation

// Runs `hybridiq <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hybridiq::cli
