#pragma once

// Command-line front end. Every subcommand is reachable through run(), which
// never throws: errors are reported on err and mapped to exit codes.

#include <iosfwd>
#include <string>
#include <vector>

namespace rbs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rbs::cli
