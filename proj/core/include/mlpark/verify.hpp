#pragma once

// Cross-module consistency checks behind `mlpark verify`.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlpark/analytic.hpp"

namespace mlpark {

enum class VerifyLevel { quick, full };

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // deviation or violation count
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  [[nodiscard]] bool passed() const;
  void print(std::ostream& out) const;
};

/// Substitution points for fault-injection tests.
struct VerifyHooks {
  std::function<Rational(LayerIndex)> end_density = [](LayerIndex r) {
    return mlpark::end_density(r);
  };
};

/// quick: oracle up to 8 arrivals, 1e5 replications. full: oracle up to 12
/// arrivals plus the windowed DP, 1e6 replications.
[[nodiscard]] VerifyReport run_verification(VerifyLevel level, unsigned threads = 0,
                                            const VerifyHooks& hooks = {});

/// Reference end-densities for layers 1..10 as "p/q" strings.
[[nodiscard]] const std::vector<std::string>& reference_end_densities();

}  // namespace mlpark
