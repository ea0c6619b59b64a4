#ifndef DSTOP_TOOLS_CLI_HPP
#define DSTOP_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace dstop::cli {

inline constexpr const char* kVersion = "0.1.0";

enum Exit : int { kOk = 0, kUsage = 1, kBadInput = 2, kNoConvergence = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dstop::cli

#endif
