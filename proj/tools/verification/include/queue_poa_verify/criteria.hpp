#pragma once

#include <string>
#include <vector>

namespace queue_poa::verify {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Identifiers of the numerical acceptance criteria, 1 through 13.
std::vector<int> criterion_ids();

/// Runs one criterion. Exceptions thrown by the library are reported as a
/// failure with the message in `detail`.
CriterionResult run_criterion(int id);

/// "PASS criterion  7  loss closed-form instance  (0.001 s)  detail"
std::string format_line(const CriterionResult& r);

}  // namespace queue_poa::verify
