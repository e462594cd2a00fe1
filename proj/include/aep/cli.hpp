#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aep {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitEngine = 3,
    kExitCheckFailed = 4,
};

// Runs the command line (without the program name). Results go to `out`
// unless --out is given; diagnostics and warnings go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aep
