#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oowm/config.hpp"

namespace oowm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kDataError = 1,      // malformed input, unusable references, bad flags
  kServiceError = 2,   // embedding service failures; safe to retry
};

/// Runs the `oowm` command line. `args[0]` is the program name. Results go
/// to `out` (or the file named by --out), diagnostics to `err` as JSON.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_environment());

}  // namespace oowm::cli
