#pragma once

#include <iosfwd>

namespace modcs::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFailure = 2,         // numerical, size or I/O failure
  kNotRecoverable = 3,  // `check` ran fine and the answer is no
  kToleranceFailed = 4, // `experiment` finished but a check in summary.json failed
};

/// Entry point of the `modcs` tool. Never throws; every path ends in one of
/// the exit codes above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modcs::cli
