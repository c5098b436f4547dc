#pragma once

// Seeded Monte Carlo estimation of occupancy densities.
//
// Only the merged arrival order matters for the final configuration, so a
// replication draws an ordered list of site labels instead of timestamps:
//  - fixed time t: per-site counts N(x) ~ Poisson(t), uniformly shuffled;
//  - fixed arrivals M: M independent uniform labels (end-density mode).
//
// Replication i always uses replication_stream(seed, i) and aggregation is
// integer counting, so results are bit-identical for any thread count.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mlpark/lattice.hpp"
#include "mlpark/random.hpp"

namespace mlpark {

using ArrivalSequence = std::vector<SiteIndex>;

struct FixedTime {
  double t = 1.0;
  friend bool operator==(const FixedTime&, const FixedTime&) = default;
};
struct FixedArrivals {
  std::uint64_t arrivals = 600;
  friend bool operator==(const FixedArrivals&, const FixedArrivals&) = default;
};
using RunMode = std::variant<FixedTime, FixedArrivals>;

struct RunConfig {
  SiteIndex n_sites = 3;
  RunMode mode = FixedArrivals{};
  std::uint64_t replications = 1;
  LayerIndex max_layer = 10;             // observe layers 1..max_layer
  std::vector<SiteIndex> observe_sites;  // empty: center_sites(n_sites)
  std::uint64_t seed = 0;
  bool track_raises = false;
  unsigned threads = 0;                  // 0: hardware concurrency

  /// Throws InputError describing the first invalid field.
  void validate() const;
  [[nodiscard]] std::vector<SiteIndex> resolved_observe_sites() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Middle site for odd n, the two middle sites for even n.
[[nodiscard]] std::vector<SiteIndex> center_sites(SiteIndex n_sites);

/// Arrival budget for end-density runs: max(600, 20 n R).
[[nodiscard]] std::uint64_t recommended_arrivals(SiteIndex n_sites, LayerIndex max_layer);

struct DensityEstimate {
  SiteIndex site = 0;
  LayerIndex layer = 1;
  std::uint64_t occupied = 0;
  std::uint64_t replications = 0;
  double mean = 0.0;
  double standard_error = 0.0;  // sqrt(mean (1 - mean) / replications)
};

struct RaiseStats {
  std::uint64_t raised = 0;  // arrivals that increased the height
  std::uint64_t total = 0;
  std::uint64_t replications = 0;
  std::uint64_t sum_abs_side_difference = 0;  // sum over reps of |N(-1) - N(1)|

  [[nodiscard]] double raise_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(raised) / static_cast<double>(total);
  }
  [[nodiscard]] double mean_abs_side_difference() const {
    return replications == 0 ? 0.0
                              : static_cast<double>(sum_abs_side_difference) /
                                    static_cast<double>(replications);
  }
};

struct RunResult {
  RunConfig config;
  std::vector<DensityEstimate> estimates;  // site-major, layers ascending
  std::optional<RaiseStats> raises;
  // Three-site runs only: histogram of the final center height and the
  // per-replication check H == N(0) + max(N(-1), N(1)).
  std::vector<std::uint64_t> height_histogram;
  std::uint64_t height_checks = 0;
  std::uint64_t height_violations = 0;
  std::vector<std::string> warnings;

  [[nodiscard]] const DensityEstimate& at(SiteIndex site, LayerIndex layer) const;
};

[[nodiscard]] ArrivalSequence sample_arrivals_fixed_time(SiteIndex n_sites, double t,
                                                         Xoshiro256pp& rng);
[[nodiscard]] ArrivalSequence sample_arrivals_fixed_count(SiteIndex n_sites,
                                                          std::uint64_t arrivals,
                                                          Xoshiro256pp& rng);

[[nodiscard]] RunResult run(const RunConfig& config);

/// Fraction of arrivals that raise the center height (three sites,
/// fixed-arrivals mode). Throws UnsupportedConfiguration otherwise.
[[nodiscard]] RaiseStats raise_fraction(RunConfig config);

/// Mean over the observed center sites per layer; for even n the two
/// middle sites are averaged.
[[nodiscard]] std::vector<double> center_profile(const RunResult& result);

}  // namespace mlpark
