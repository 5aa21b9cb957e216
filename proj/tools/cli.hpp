#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blurbkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // bad flags or configuration
inline constexpr int kExitData = 2;   // unreadable, malformed or invalid input

// Runs one command line (args exclude the program name). Results go to `out`
// unless an --output file is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blurbkit::cli
