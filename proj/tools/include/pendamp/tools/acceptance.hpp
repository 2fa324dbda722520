#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pendamp::tools {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;     // wall time of the computation behind the check
  double time_limit = 0.0;  // 0 when the check has no limit of its own
};

struct AcceptanceOptions {
  // Coarser extremal grid (128 points per sign) and bifurcation tolerance 1e-4.
  bool fast = false;
  unsigned threads = 1;
};

using CriterionSink = std::function<void(const CriterionResult&)>;

/// Runs the fifteen acceptance checks in order; `sink` sees each result as soon
/// as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const CriterionSink& sink = {});

/// "PASS  7  sturm spacing: ... [12.3 s / 300 s]"
std::string format_result(const CriterionResult& r);

}  // namespace pendamp::tools
