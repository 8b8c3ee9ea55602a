#pragma once

#include "horizon/config.hpp"

#include <string>
#include <vector>

namespace horizon {

struct Check {
  std::string name;
  double value = 0.0;
  std::string threshold;  // human-readable bound the value is held to
  bool pass = false;
};

// Fast model checks: Bloch oracle, stability scans, cone regimes, rate
// formulas and operator symmetries.
std::vector<Check> run_checks(const ValidateConfig& cfg);

}  // namespace horizon
