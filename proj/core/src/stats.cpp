#include "mlpark/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mlpark {

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

TrendTest mann_kendall(std::span<const double> values) {
  TrendTest out;
  const std::size_t n = values.size();
  if (n < 2) return out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.s += (values[j] > values[i]) - (values[j] < values[i]);
    }
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  const double nn = static_cast<double>(n);
  out.variance = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - ties) / 18.0;
  if (out.variance > 0.0) {
    if (out.s > 0) out.z = (static_cast<double>(out.s) - 1.0) / std::sqrt(out.variance);
    if (out.s < 0) out.z = (static_cast<double>(out.s) + 1.0) / std::sqrt(out.variance);
  }
  out.p_increasing = normal_upper_tail(out.z);
  return out;
}

std::optional<std::size_t> first_index_above(std::span<const double> values, double threshold) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > threshold) return i + 1;
  }
  return std::nullopt;
}

}  // namespace mlpark
