#pragma once

// Multilayer parking lattice without screening.
//
// Sites are indexed 0..n_sites-1. Positions -1 and n_sites are virtual
// boundary positions: they never receive arrivals and are never occupied.
// Layers are 1-based in every public interface; layer 1 is the substrate
// row. Internally column bit b holds layer b+1.
//
// For the three-site system the symmetric coordinates x = -1, 0, 1 map to
// site indices 0, 1, 2.

#include <cstdint>
#include <span>
#include <vector>

namespace mlpark {

using SiteIndex = std::uint32_t;
using LayerIndex = std::uint32_t;

struct LatticeConfig {
  SiteIndex n_sites = 3;

  /// Throws InputError when n_sites == 0.
  void validate() const;
};

/// Site x together with its horizontal neighbours, clipped to [0, n_sites).
struct Neighborhood {
  SiteIndex center = 0;
  SiteIndex first = 0;
  SiteIndex last = 0;  // inclusive

  [[nodiscard]] std::uint32_t size() const { return last - first + 1; }
  [[nodiscard]] bool contains(SiteIndex s) const { return s >= first && s <= last; }
};

[[nodiscard]] Neighborhood neighborhood(const LatticeConfig& config, SiteIndex x);

class LatticeState {
 public:
  explicit LatticeState(LatticeConfig config);

  /// Drops a particle at site x. It settles in the lowest layer where x and
  /// both horizontal neighbours are empty; that 1-based layer is returned.
  /// Throws InputError for x >= n_sites.
  LayerIndex deposit(SiteIndex x);

  /// kappa(x, r). Any integer x is accepted; boundary and outside positions
  /// report false. r is 1-based; r == 0 reports false.
  [[nodiscard]] bool occupied(std::int64_t x, LayerIndex r) const;

  [[nodiscard]] const LatticeConfig& config() const { return config_; }
  [[nodiscard]] SiteIndex n_sites() const { return config_.n_sites; }
  [[nodiscard]] std::uint64_t arrivals(SiteIndex x) const;
  [[nodiscard]] std::span<const std::uint64_t> arrival_counts() const { return arrivals_; }
  [[nodiscard]] std::uint64_t total_arrivals() const { return total_arrivals_; }

  /// Highest occupied layer anywhere on the lattice, 0 when empty.
  [[nodiscard]] LayerIndex top_layer() const { return top_layer_; }

  /// Raw column bitset for site x; word w bit b is layer 64*w + b + 1.
  [[nodiscard]] std::span<const std::uint64_t> column_words(SiteIndex x) const {
    return columns_[x];
  }

  /// Empties the lattice, keeping allocations.
  void reset();

  /// Throws std::logic_error if exclusion or conservation is violated.
  void check_invariants() const;

  friend bool operator==(const LatticeState& a, const LatticeState& b);

 private:
  LatticeConfig config_;
  std::vector<std::vector<std::uint64_t>> columns_;
  // Per site: every word below this index is full in the union of the
  // neighbourhood columns. Occupancy only grows, so it never moves down.
  std::vector<std::size_t> scan_start_;
  std::vector<std::uint64_t> arrivals_;
  std::uint64_t total_arrivals_ = 0;
  LayerIndex top_layer_ = 0;
};

/// H(0) for the three-site system: the number of layers holding at least
/// one particle. Throws UnsupportedConfiguration unless n_sites == 3.
[[nodiscard]] std::uint64_t height_center(const LatticeState& state);

/// N(0) + max(N(-1), N(1)) from the arrival counts alone (n_sites == 3).
[[nodiscard]] std::uint64_t height_from_counts(const LatticeState& state);

}  // namespace mlpark
