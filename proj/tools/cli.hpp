#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace replica::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInputError = 2,
    kInfeasible = 3,
};

// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace replica::cli
