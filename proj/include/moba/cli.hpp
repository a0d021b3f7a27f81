#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace moba::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDataError = 2,
    kNoFeasible = 3,
};

/// Entry point of the `moba` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace moba::cli
