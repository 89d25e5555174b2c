#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cptv::harness {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalFailure = 2 };

// Subcommands: generate, train, evaluate, regret-check, report.
// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cptv::harness
