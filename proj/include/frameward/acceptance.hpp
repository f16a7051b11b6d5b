#pragma once

// The acceptance suite: fifteen numbered end-to-end checks with time
// budgets.  Shared by the acceptance test binary and `frameward selftest`.

#include <functional>
#include <string>
#include <vector>

namespace frameward {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Measured quantities, and the reason on failure.
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

inline constexpr int kAcceptanceCount = 15;

/// Runs criterion id (1-based).  A criterion that exceeds its time budget
/// fails.  Exceptions are reported as failures.
CriterionResult run_criterion(int id);

/// Runs the given ids (all when empty) in order, calling on_result after
/// each one.
std::vector<CriterionResult> run_acceptance(
    const std::vector<int>& ids = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [n] title (t s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace frameward
