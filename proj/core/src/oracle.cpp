#include "mlpark/oracle.hpp"

#include <algorithm>
#include <bit>
#include <fmt/format.h>

#include "mlpark/errors.hpp"

namespace mlpark {

namespace {

std::uint64_t enumeration_cost(SiteIndex n_sites, std::uint32_t max_arrivals) {
  std::uint64_t level = 1;
  std::uint64_t total = 1;
  for (std::uint32_t m = 1; m <= max_arrivals; ++m) {
    if (level > kEnumerationBudget / n_sites) return kEnumerationBudget + 1;
    level *= n_sites;
    total += level;
  }
  return total;
}

BigInt power(SiteIndex base, std::uint32_t e) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, e);
  return out;
}

// counts[m][site * m + (layer - 1)]; after m arrivals no layer exceeds m.
class Enumerator {
 public:
  Enumerator(SiteIndex n_sites, std::uint32_t max_arrivals)
      : n_(n_sites), max_(max_arrivals), counts_(max_arrivals + 1) {
    for (std::uint32_t m = 0; m <= max_; ++m) counts_[m].assign(std::size_t{n_} * m, 0);
  }

  void run() { visit(LatticeState(LatticeConfig{n_}), 0); }

  std::vector<ExactOccupancy> results() const {
    std::vector<ExactOccupancy> out;
    out.reserve(max_ + 1);
    for (std::uint32_t m = 0; m <= max_; ++m) {
      ExactOccupancy occ;
      occ.n_sites = n_;
      occ.arrivals = m;
      occ.denominator = power(n_, m);
      for (SiteIndex s = 0; s < n_; ++s) {
        for (LayerIndex r = 1; r <= m; ++r) {
          const std::uint64_t c = counts_[m][std::size_t{s} * m + (r - 1)];
          if (c != 0) occ.numerators[{s, r}] = BigInt(static_cast<unsigned long>(c));
        }
      }
      out.push_back(std::move(occ));
    }
    return out;
  }

 private:
  void visit(const LatticeState& state, std::uint32_t depth) {
    auto& row = counts_[depth];
    for (SiteIndex s = 0; s < n_; ++s) {
      const auto column = state.column_words(s);
      for (std::size_t w = 0; w < column.size(); ++w) {
        for (std::uint64_t bits = column[w]; bits != 0; bits &= bits - 1) {
          const std::size_t layer = w * 64 + std::countr_zero(bits) + 1;
          ++row[std::size_t{s} * depth + (layer - 1)];
        }
      }
    }
    if (depth == max_) return;
    for (SiteIndex x = 0; x < n_; ++x) {
      LatticeState next = state;
      next.deposit(x);
      visit(next, depth + 1);
    }
  }

  SiteIndex n_;
  std::uint32_t max_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

// One n-bit mask per layer, bottom first. Layers above `window` that are
// frozen are removed; trailing empty layers never appear.
using MaskState = std::vector<std::uint64_t>;

class MaskDynamics {
 public:
  MaskDynamics(SiteIndex n_sites, LayerIndex window) : n_(n_sites), window_(window) {
    for (SiteIndex x = 0; x < n_; ++x) {
      std::uint64_t nb = 1ULL << x;
      if (x > 0) nb |= 1ULL << (x - 1);
      if (x + 1 < n_) nb |= 1ULL << (x + 1);
      neighbourhoods_.push_back(nb);
    }
  }

  MaskState deposit(const MaskState& state, SiteIndex x) const {
    const std::uint64_t nb = neighbourhoods_[x];
    std::size_t layer = 0;
    while (layer < state.size() && (state[layer] & nb) != 0) ++layer;
    MaskState next = state;
    if (layer == next.size()) next.push_back(0);
    next[layer] |= 1ULL << x;
    if (layer >= window_ && frozen(next[layer])) next.erase(next.begin() + layer);
    return next;
  }

 private:
  bool frozen(std::uint64_t mask) const {
    return std::all_of(neighbourhoods_.begin(), neighbourhoods_.end(),
                       [mask](std::uint64_t nb) { return (mask & nb) != 0; });
  }

  SiteIndex n_;
  std::size_t window_;
  std::vector<std::uint64_t> neighbourhoods_;
};

void check_sizes(SiteIndex n_sites) {
  if (n_sites == 0) throw InputError("n_sites must be at least 1");
}

}  // namespace

Rational ExactOccupancy::at(SiteIndex site, LayerIndex layer) const {
  if (window != 0 && layer > window) {
    throw InputError(fmt::format("layer {} outside the exact window 1..{}", layer, window));
  }
  const auto it = numerators.find({site, layer});
  if (it == numerators.end()) return Rational(0);
  Rational out(it->second, denominator);
  out.canonicalize();
  return out;
}

LayerIndex ExactOccupancy::deepest_layer() const {
  LayerIndex deepest = 0;
  for (const auto& [key, value] : numerators) {
    if (value != 0) deepest = std::max(deepest, key.second);
  }
  return deepest;
}

std::vector<ExactOccupancy> exact_occupancy_by_arrivals(SiteIndex n_sites,
                                                        std::uint32_t max_arrivals) {
  check_sizes(n_sites);
  if (enumeration_cost(n_sites, max_arrivals) > kEnumerationBudget) {
    throw SizeError(fmt::format(
        "enumerating {}^{} arrival orders exceeds the budget of {} sequences; use the "
        "dynamic-programming oracle",
        n_sites, max_arrivals, kEnumerationBudget));
  }
  Enumerator e(n_sites, max_arrivals);
  e.run();
  return e.results();
}

ExactOccupancy exact_after_m_arrivals(SiteIndex n_sites, std::uint32_t arrivals) {
  return std::move(exact_occupancy_by_arrivals(n_sites, arrivals).back());
}

std::vector<ExactOccupancy> exact_occupancy_dp_by_arrivals(SiteIndex n_sites,
                                                           std::uint32_t max_arrivals,
                                                           LayerIndex window) {
  check_sizes(n_sites);
  if (n_sites > 64) throw SizeError("the mask oracle supports at most 64 sites");
  if (window == 0) throw InputError("window must be at least 1 layer");
  const MaskDynamics dynamics(n_sites, window);

  std::vector<ExactOccupancy> out;
  std::map<MaskState, BigInt> level{{MaskState{}, BigInt(1)}};
  for (std::uint32_t m = 0;; ++m) {
    ExactOccupancy occ;
    occ.n_sites = n_sites;
    occ.arrivals = m;
    occ.window = window;
    occ.denominator = power(n_sites, m);
    for (const auto& [state, weight] : level) {
      const std::size_t top = std::min<std::size_t>(state.size(), window);
      for (std::size_t layer = 0; layer < top; ++layer) {
        for (std::uint64_t bits = state[layer]; bits != 0; bits &= bits - 1) {
          const auto site = static_cast<SiteIndex>(std::countr_zero(bits));
          occ.numerators[{site, static_cast<LayerIndex>(layer + 1)}] += weight;
        }
      }
    }
    out.push_back(std::move(occ));
    if (m == max_arrivals) break;

    std::map<MaskState, BigInt> next;
    for (const auto& [state, weight] : level) {
      for (SiteIndex x = 0; x < n_sites; ++x) next[dynamics.deposit(state, x)] += weight;
    }
    if (next.size() > kDpStateBudget) {
      throw SizeError(fmt::format("oracle DP exceeded {} states at {} arrivals", kDpStateBudget,
                                  m + 1));
    }
    level = std::move(next);
  }
  return out;
}

ExactOccupancy exact_after_m_arrivals_dp(SiteIndex n_sites, std::uint32_t arrivals,
                                         LayerIndex window) {
  return std::move(exact_occupancy_dp_by_arrivals(n_sites, arrivals, window).back());
}

PoissonizedDensity exact_density_poissonized(SiteIndex n_sites, double t, LayerIndex layer,
                                             SiteIndex site, std::uint32_t max_arrivals,
                                             OracleMethod method) {
  check_sizes(n_sites);
  if (site >= n_sites) throw InputError(fmt::format("site {} outside [0, {})", site, n_sites));
  if (layer == 0) throw InputError("layers are 1-based");
  const double mean = static_cast<double>(n_sites) * t;
  PoissonizedDensity out;
  out.max_arrivals = max_arrivals;
  out.tail_bound = poisson_tail_bound(max_arrivals, mean);  // validates t
  if (t == 0.0) return out;

  if (method == OracleMethod::automatic) {
    method = enumeration_cost(n_sites, max_arrivals) <= kEnumerationBudget
                 ? OracleMethod::enumeration
                 : OracleMethod::dynamic_programming;
  }
  const auto profile = method == OracleMethod::enumeration
                           ? exact_occupancy_by_arrivals(n_sites, max_arrivals)
                           : exact_occupancy_dp_by_arrivals(n_sites, max_arrivals, layer);
  for (std::uint32_t m = 0; m <= max_arrivals; ++m) {
    const Rational occ = profile[m].at(site, layer);
    if (occ == 0) continue;
    out.value += poisson_pmf(m, mean) * occ.get_d();
  }
  return out;
}

PoissonizedDensity exact_density_poissonized_within(SiteIndex n_sites, double t,
                                                    LayerIndex layer, SiteIndex site,
                                                    double tail) {
  const double mean = static_cast<double>(n_sites) * t;
  const auto m_max = static_cast<std::uint32_t>(poisson_truncation_point(mean, tail));
  return exact_density_poissonized(n_sites, t, layer, site, m_max,
                                   OracleMethod::dynamic_programming);
}

DiscreteDist<Rational> exact_height_dist(std::uint32_t arrivals) {
  if (enumeration_cost(3, arrivals) > kEnumerationBudget) {
    throw SizeError(fmt::format("enumerating 3^{} arrival orders exceeds the budget", arrivals));
  }
  std::vector<std::uint64_t> histogram(arrivals + 1, 0);
  // Depth-first over orders; only leaves contribute.
  auto visit = [&](auto&& self, const LatticeState& state, std::uint32_t depth) -> void {
    if (depth == arrivals) {
      ++histogram[height_center(state)];
      return;
    }
    for (SiteIndex x = 0; x < 3; ++x) {
      LatticeState next = state;
      next.deposit(x);
      self(self, next, depth + 1);
    }
  };
  visit(visit, LatticeState(LatticeConfig{3}), 0);

  const BigInt total = power(3, arrivals);
  DiscreteDist<Rational> dist;
  for (std::uint64_t c : histogram) {
    Rational p(BigInt(static_cast<unsigned long>(c)), total);
    p.canonicalize();
    dist.probabilities.push_back(p);
  }
  return dist;
}

DiscreteDist<Rational> multinomial_height_dist(std::uint32_t arrivals) {
  const BigInt total = power(3, arrivals);
  std::vector<BigInt> ways(arrivals + 1, BigInt(0));
  for (std::uint32_t left = 0; left <= arrivals; ++left) {
    for (std::uint32_t right = 0; left + right <= arrivals; ++right) {
      const std::uint32_t center = arrivals - left - right;
      // m! / (left! center! right!) as a product of binomials
      const BigInt count = binomial(arrivals, left) * binomial(arrivals - left, right);
      ways[center + std::max(left, right)] += count;
    }
  }
  DiscreteDist<Rational> dist;
  for (const auto& w : ways) {
    Rational p(w, total);
    p.canonicalize();
    dist.probabilities.push_back(p);
  }
  return dist;
}

}  // namespace mlpark
