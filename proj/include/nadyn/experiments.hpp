#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nadyn/config.hpp"

namespace nadyn {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNonConvergence = 3 };

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> artifacts;
  /// Human-readable summary lines.
  std::string summary;
};

/// Runs one validated experiment and writes its artifacts under the `out`
/// prefix. Every artifact starts with the canonical config JSON. Failures of
/// the inner operations come back as kExitConfig with the config attached.
RunResult run(const ExperimentConfig& config);

/// Parses and runs; configuration errors are all reported to `log`.
int run_text(const std::string& text, std::ostream& log);

}  // namespace nadyn
