#pragma once

#include <string>
#include <vector>

#include "hierobs/run_config.hpp"

namespace hierobs {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the ten acceptance criteria against `reference` (the shipped default
/// scenario) and returns one result per criterion, in order.
std::vector<CriterionResult> run_acceptance_suite(const RunConfig& reference);

/// "PASS  3 name  (detail; 0.01 s)".
std::string format_result(const CriterionResult& r);

}  // namespace hierobs
