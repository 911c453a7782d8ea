#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ipd::cli {

// Runs `ipd <subcommand> ...` with args excluding the program name.
// Returns the process exit code: 0 success, 2 usage, 3 data, 4 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ipd::cli
