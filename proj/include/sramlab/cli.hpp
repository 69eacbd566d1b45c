#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sramlab::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,        // convergence failure, analysis failure or I/O error
    kParseError = 2,     // malformed netlist or argument value
    kInvalidConfig = 3,  // unknown flag/command or out-of-range configuration
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

}  // namespace sramlab::cli
