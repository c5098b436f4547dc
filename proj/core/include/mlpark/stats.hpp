#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace mlpark {

/// Mann-Kendall trend test on a sequence ordered by its index.
struct TrendTest {
  long long s = 0;        // sum of sign(x_j - x_i), i < j
  double variance = 0.0;  // tie-corrected
  double z = 0.0;         // continuity-corrected normal score
  double p_increasing = 1.0;  // one-sided p-value for an upward trend

  [[nodiscard]] bool increasing_at(double alpha) const { return p_increasing < alpha; }
};

[[nodiscard]] TrendTest mann_kendall(std::span<const double> values);

/// Upper-tail standard normal probability.
[[nodiscard]] double normal_upper_tail(double z);

/// 1-based position of the first value strictly above threshold.
[[nodiscard]] std::optional<std::size_t> first_index_above(std::span<const double> values,
                                                           double threshold);

}  // namespace mlpark
