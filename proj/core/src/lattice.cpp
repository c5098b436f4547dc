#include "mlpark/lattice.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

#include "mlpark/errors.hpp"

namespace mlpark {

namespace {

constexpr std::uint64_t kFull = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t word_or_zero(const std::vector<std::uint64_t>& column, std::size_t w) {
  return w < column.size() ? column[w] : 0;
}

}  // namespace

void LatticeConfig::validate() const {
  if (n_sites == 0) {
    throw InputError("n_sites must be at least 1");
  }
}

Neighborhood neighborhood(const LatticeConfig& config, SiteIndex x) {
  if (x >= config.n_sites) {
    throw InputError("site " + std::to_string(x) + " outside [0, " +
                     std::to_string(config.n_sites) + ")");
  }
  Neighborhood nb;
  nb.center = x;
  nb.first = x == 0 ? 0 : x - 1;
  nb.last = std::min<SiteIndex>(x + 1, config.n_sites - 1);
  return nb;
}

LatticeState::LatticeState(LatticeConfig config) : config_(config) {
  config_.validate();
  columns_.resize(config_.n_sites);
  scan_start_.assign(config_.n_sites, 0);
  arrivals_.assign(config_.n_sites, 0);
}

LayerIndex LatticeState::deposit(SiteIndex x) {
  const Neighborhood nb = neighborhood(config_, x);

  std::size_t w = scan_start_[x];
  std::uint64_t blocked = 0;
  for (;; ++w) {
    blocked = 0;
    for (SiteIndex s = nb.first; s <= nb.last; ++s) {
      blocked |= word_or_zero(columns_[s], w);
    }
    if (blocked != kFull) break;
  }
  scan_start_[x] = w;
  const unsigned bit = static_cast<unsigned>(std::countr_one(blocked));

  auto& column = columns_[x];
  if (column.size() <= w) column.resize(w + 1, 0);
  column[w] |= std::uint64_t{1} << bit;

  ++arrivals_[x];
  ++total_arrivals_;
  const auto layer = static_cast<LayerIndex>(w * 64 + bit + 1);
  top_layer_ = std::max(top_layer_, layer);
  return layer;
}

bool LatticeState::occupied(std::int64_t x, LayerIndex r) const {
  if (x < 0 || x >= static_cast<std::int64_t>(config_.n_sites) || r == 0) return false;
  const std::size_t idx = r - 1;
  const auto& column = columns_[static_cast<std::size_t>(x)];
  return (word_or_zero(column, idx / 64) >> (idx % 64)) & 1u;
}

std::uint64_t LatticeState::arrivals(SiteIndex x) const {
  if (x >= config_.n_sites) {
    throw InputError("site " + std::to_string(x) + " outside lattice");
  }
  return arrivals_[x];
}

void LatticeState::reset() {
  for (auto& column : columns_) std::fill(column.begin(), column.end(), 0);
  std::fill(scan_start_.begin(), scan_start_.end(), 0);
  std::fill(arrivals_.begin(), arrivals_.end(), 0);
  total_arrivals_ = 0;
  top_layer_ = 0;
}

void LatticeState::check_invariants() const {
  std::uint64_t cells = 0;
  std::uint64_t counted = 0;
  for (SiteIndex s = 0; s < config_.n_sites; ++s) {
    std::uint64_t in_column = 0;
    for (std::uint64_t word : columns_[s]) in_column += std::popcount(word);
    if (in_column != arrivals_[s]) {
      throw std::logic_error("column " + std::to_string(s) + " holds " +
                             std::to_string(in_column) + " particles but saw " +
                             std::to_string(arrivals_[s]) + " arrivals");
    }
    cells += in_column;
    counted += arrivals_[s];
    if (s + 1 < config_.n_sites) {
      const auto& a = columns_[s];
      const auto& b = columns_[s + 1];
      for (std::size_t w = 0; w < std::min(a.size(), b.size()); ++w) {
        if (a[w] & b[w]) {
          throw std::logic_error("adjacent particles at sites " + std::to_string(s) +
                                 "," + std::to_string(s + 1));
        }
      }
    }
  }
  if (cells != total_arrivals_ || counted != total_arrivals_) {
    throw std::logic_error("occupied cell count does not match total arrivals");
  }
}

bool operator==(const LatticeState& a, const LatticeState& b) {
  if (a.config_.n_sites != b.config_.n_sites) return false;
  for (SiteIndex s = 0; s < a.config_.n_sites; ++s) {
    const auto& ca = a.columns_[s];
    const auto& cb = b.columns_[s];
    const std::size_t n = std::max(ca.size(), cb.size());
    for (std::size_t w = 0; w < n; ++w) {
      if (word_or_zero(ca, w) != word_or_zero(cb, w)) return false;
    }
  }
  return a.arrivals_ == b.arrivals_;
}

std::uint64_t height_center(const LatticeState& state) {
  if (state.n_sites() != 3) {
    throw UnsupportedConfiguration("height_center is defined only for the three-site system");
  }
  const auto left = state.column_words(0);
  const auto mid = state.column_words(1);
  const auto right = state.column_words(2);
  const std::size_t n = std::max({left.size(), mid.size(), right.size()});
  std::uint64_t layers = 0;
  for (std::size_t w = 0; w < n; ++w) {
    const std::uint64_t any = (w < left.size() ? left[w] : 0) | (w < mid.size() ? mid[w] : 0) |
                              (w < right.size() ? right[w] : 0);
    layers += std::popcount(any);
  }
  return layers;
}

std::uint64_t height_from_counts(const LatticeState& state) {
  if (state.n_sites() != 3) {
    throw UnsupportedConfiguration("height_from_counts is defined only for the three-site system");
  }
  return state.arrivals(1) + std::max(state.arrivals(0), state.arrivals(2));
}

}  // namespace mlpark
