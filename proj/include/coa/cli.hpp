#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coa::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNoPath = 2 };

/// Runs the command line `args` (args[0] is the program name). Never throws;
/// every failure is reported on `err` and mapped to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coa::cli
