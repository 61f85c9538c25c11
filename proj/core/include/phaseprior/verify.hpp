#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phaseprior {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-checks of the engine's mathematical invariants on small random
/// problems: unitarity, prox optimality, gradient consistency, metric
/// invariances. Meant as a quick installation sanity check.
std::vector<CheckResult> run_property_suite(std::uint64_t seed = 0);

}  // namespace phaseprior
