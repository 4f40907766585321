#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cmaopt::bench {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runtime invariant sweep over the built-in problem families: oracle
/// additivity, gradient vs finite differences, inner-cycle identity and
/// displacement bound, linesearch certificates, CMA level-set containment,
/// NMCMA nonmonotone decrease, stepsize law and profile monotonicity.
std::vector<CheckResult> run_invariant_checks(std::uint64_t seed);

}  // namespace cmaopt::bench
