#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hybridiq {

// Outcome of one randomized property over all trials. `max_deviation` is the
// largest measured defect: |lhs − rhs| for identities, the excess over the
// bound for inequalities.
struct PropertyResult {
  std::string name;
  double tolerance = 0.0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_deviation = 0.0;

  void record(double deviation);
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<PropertyResult> properties;

  bool passed() const;
  std::size_t violations() const;
};

// axioms, metric, channel, vieq, correlations, locc.
const std::vector<std::string>& suite_names();

// Throws Error(UnknownSuite). Each trial draws from its own split of `seed`,
// so reports are reproducible and independent of the trial count.
SuiteReport run_suite(const std::string& name, std::size_t trials, std::uint64_t seed);

}  // namespace hybridiq
