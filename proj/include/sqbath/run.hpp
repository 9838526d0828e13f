#pragma once

#include "sqbath/config.hpp"
#include "sqbath/output.hpp"

namespace sqbath {

struct RunOutput {
  ScanTable table;
  /// Free-form diagnostic notes emitted into the output metadata.
  std::vector<std::string> findings;
  /// Number of scan points that failed entirely (rows carry NaN payloads).
  /// Drives the process exit code: nonzero means partial results.
  int flagged_failures = 0;
};

/// Executes the configured command and returns its result table. Throws on
/// configuration or whole-run failures; per-point failures inside scans are
/// recorded as flagged rows and findings instead.
RunOutput run_command(const RunConfig& config);

}  // namespace sqbath
