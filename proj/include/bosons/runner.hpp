#pragma once

#include <string>
#include <vector>

#include "bosons/config.hpp"

namespace bosons {

/// One verification entry of a run report. `asserted` entries decide the exit
/// code; `report` entries carry diagnostics without pass/fail semantics.
struct CheckEntry {
  std::string name;
  std::string anchor;     // stable identifier of the fact being checked
  bool asserted = true;
  bool passed = true;
  double value = 0.0;
  double tolerance = 0.0;
  std::string details;
};

struct RunReport {
  int schema_version = 1;
  RunConfig config;
  std::vector<CheckEntry> checks;
  double timing_ms = 0.0;
  std::vector<std::string> artifacts;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (c.asserted && !c.passed) return false;
    }
    return true;
  }
};

/// Execute the configured experiment; writes artifacts and the JSON report
/// into config.out_dir. Deterministic given (config, seed).
RunReport run(const RunConfig& config);

/// Serialize the report (stable field order).
std::string report_to_json(const RunReport& report);

}  // namespace bosons
