#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clarkesat::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kNotYetCovered = 3,
    kToleranceExhausted = 4,
    kIo = 5,
};

/// Runs one command line (without the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace clarkesat::cli
