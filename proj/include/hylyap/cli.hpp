#pragma once

// Command-line driver: simulate, certify, levelset and reproduce subcommands.

#include <iosfwd>
#include <string>
#include <vector>

namespace hylyap::cli {

enum ExitCode : int {
  kPass = 0,
  kCheckFailed = 1,
  kNumericFailure = 2,
  kUsage = 64,
  kDomain = 65,
};

/// Runs the CLI on args (without the program name), writing normal output to
/// out and diagnostics to err. Never throws; failures map to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hylyap::cli
