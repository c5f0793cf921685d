#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace metro::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kSchema = 3,
    kModel = 4,
    kMismatch = 5,
};

/// Environment variable consulted when no config path is given.
inline constexpr const char* kConfigEnvVar = "METRO_CONFIG";

/// Runs the command line `args` (args[0] is the program name). Errors are
/// reported on `err` as one line "<reason>: <detail>" and mapped to ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace metro::cli
