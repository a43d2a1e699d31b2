#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blowup::run {

enum ExitCode { kOk = 0, kUsage = 1, kNoConvergence = 2 };

/// Entry point of the blowuplab command line; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blowup::run
