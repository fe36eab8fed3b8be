#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hmt {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<CriterionResult(unsigned seed)> run;
};

// A1 .. A13 in order.
const std::vector<Criterion>& acceptance_criteria();
// Runs the listed ids (all when empty); exceptions become FAIL rows.
std::vector<CriterionResult> run_criteria(const std::vector<std::string>& ids = {}, unsigned seed = 42);

std::string format_result(const CriterionResult& r);

}  // namespace hmt
