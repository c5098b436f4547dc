#pragma once

// Exact small-scale ground truth for the simulator and the closed forms.
//
// Two independent routes are provided:
//  - enumeration of all n^m equally likely arrival orders, each replayed
//    through LatticeState::deposit;
//  - a dynamic program over canonical layer masks. Layers above the
//    observed window in which every site already has an occupied
//    neighbour can never receive another particle; they are dropped, which
//    keeps the state count small.
// All results are exact rationals until the final Poisson weighting.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mlpark/analytic.hpp"
#include "mlpark/lattice.hpp"

namespace mlpark {

/// Total number of enumerated sequences (summed over prefix lengths) we
/// accept before refusing with SizeError. n = 4, m = 12 fits.
inline constexpr std::uint64_t kEnumerationBudget = 1ULL << 24;
/// Maximum number of distinct canonical states per DP level.
inline constexpr std::size_t kDpStateBudget = 4'000'000;

struct CountVector {
  std::vector<std::uint64_t> counts;

  [[nodiscard]] std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }
};

/// Expected occupancy after `arrivals` uniform arrivals: numerator / denominator
/// per (site, layer), denominator = n^arrivals.
struct ExactOccupancy {
  SiteIndex n_sites = 0;
  std::uint32_t arrivals = 0;
  LayerIndex window = 0;  // layers 1..window are exact; 0 means every layer
  BigInt denominator = 1;
  std::map<std::pair<SiteIndex, LayerIndex>, BigInt> numerators;

  [[nodiscard]] Rational at(SiteIndex site, LayerIndex layer) const;
  /// Highest layer with non-zero occupancy.
  [[nodiscard]] LayerIndex deepest_layer() const;
};

/// Enumeration route. Throws SizeError when n^m exceeds kEnumerationBudget.
[[nodiscard]] ExactOccupancy exact_after_m_arrivals(SiteIndex n_sites, std::uint32_t arrivals);

/// Enumeration for every prefix length 0..max_arrivals in one pass.
[[nodiscard]] std::vector<ExactOccupancy> exact_occupancy_by_arrivals(SiteIndex n_sites,
                                                                      std::uint32_t max_arrivals);

/// Dynamic-programming route, exact for layers 1..window. n_sites <= 64.
[[nodiscard]] std::vector<ExactOccupancy> exact_occupancy_dp_by_arrivals(
    SiteIndex n_sites, std::uint32_t max_arrivals, LayerIndex window);

[[nodiscard]] ExactOccupancy exact_after_m_arrivals_dp(SiteIndex n_sites,
                                                       std::uint32_t arrivals,
                                                       LayerIndex window);

enum class OracleMethod { automatic, enumeration, dynamic_programming };

struct PoissonizedDensity {
  double value = 0.0;
  double tail_bound = 0.0;  // Pr(Poisson(n t) > max_arrivals)
  std::uint32_t max_arrivals = 0;
};

/// rho_t(site, layer) = sum_{m <= m_max} Pr(Poisson(n t) = m) occ_m(site, layer),
/// with the neglected mass reported as tail_bound. `automatic` enumerates
/// when the budget allows and falls back to the DP otherwise.
[[nodiscard]] PoissonizedDensity exact_density_poissonized(
    SiteIndex n_sites, double t, LayerIndex layer, SiteIndex site, std::uint32_t max_arrivals,
    OracleMethod method = OracleMethod::automatic);

/// Same, choosing max_arrivals so that the tail bound is below `tail`.
[[nodiscard]] PoissonizedDensity exact_density_poissonized_within(SiteIndex n_sites, double t,
                                                                  LayerIndex layer,
                                                                  SiteIndex site, double tail);

/// Law of height_center after m uniform arrivals on three sites, by
/// enumeration. Throws SizeError when 3^m exceeds the budget.
[[nodiscard]] DiscreteDist<Rational> exact_height_dist(std::uint32_t arrivals);

/// Law of m0 + max(m_left, m_right) for (m_left, m0, m_right) ~ Multinomial(m; 1/3, 1/3, 1/3).
[[nodiscard]] DiscreteDist<Rational> multinomial_height_dist(std::uint32_t arrivals);

}  // namespace mlpark
