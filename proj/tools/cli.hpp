#pragma once

#include <iosfwd>

namespace freeprod::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kBadConfig = 2,
  kResourceLimit = 3,
  kPrecondition = 4,
};

/// Runs `freeprod <command> <config.json> [flags]`. Progress and errors go to
/// `err`, a short summary to `out`, artifacts to --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freeprod::cli
