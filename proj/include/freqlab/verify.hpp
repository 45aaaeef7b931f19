#pragma once

#include <string>
#include <vector>

namespace freqlab::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

// Fast invariant battery over synthetic objectives: finite-difference
// estimators, strong Wolfe acceptance, interpolators, spectrum identities,
// filter reconstruction, and the optimizer contracts on small quadratics.
Report run_battery();

std::string render_text(const Report& report);

}  // namespace freqlab::verify
