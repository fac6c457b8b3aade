#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bunchkit::cli {

/// Stable exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitVerificationFailed = 2,
  kExitPartialFitFailure = 3,
};

/// Seed for Monte Carlo columns unless BUNCHKIT_SEED is set.
inline constexpr unsigned long long kDefaultSeed = 20240917ULL;

/// Runs the command line (without the program name) and returns the exit
/// code. Reports go to `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bunchkit::cli
