#pragma once

// Closed-form results for the three-site system.
//
// Exact quantities (end-densities, polynomial coefficients, the
// binomial / negative-binomial decomposition) are GMP rationals. Time
// dependent probabilities are doubles evaluated in log space.
//
// Notation used below: N(x) are the Poisson(t) arrival counts at the left,
// center and right site; H = N(center) + max(N(left), N(right)) is the
// center height; rho_t(r) is the expected center occupancy at layer r.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mlpark/lattice.hpp"

namespace mlpark {

using BigInt = mpz_class;
using Rational = mpq_class;

/// "p/q" with q > 0 and gcd(p, q) = 1; integers render as "p/1".
[[nodiscard]] std::string to_fraction_string(const Rational& value);
/// Parses "p/q" or "p". Throws InputError on malformed text or q == 0.
[[nodiscard]] Rational parse_fraction(std::string_view text);

[[nodiscard]] BigInt binomial(std::uint32_t n, std::uint32_t k);

/// A distribution on offset, offset+1, ... truncated to the stored support.
/// The omitted mass is at most tail_bound.
template <class T>
struct DiscreteDist {
  std::int64_t offset = 0;
  std::vector<T> probabilities;
  double tail_bound = 0.0;

  [[nodiscard]] T mass() const {
    T total = 0;
    for (const auto& p : probabilities) total += p;
    return total;
  }
  [[nodiscard]] T at(std::int64_t k) const {
    if (k < offset || k - offset >= static_cast<std::int64_t>(probabilities.size())) return T(0);
    return probabilities[static_cast<std::size_t>(k - offset)];
  }
};

// ---------------------------------------------------------------------------
// Poisson building blocks

/// e^{-t} t^k / k!, evaluated in extended-precision log space.
/// Throws InputError for negative or non-finite t.
[[nodiscard]] double poisson_pmf(std::uint64_t k, double t);

/// Upper bound on Pr(Poisson(mean) > k_max); 1 when no useful bound exists.
[[nodiscard]] double poisson_tail_bound(std::uint64_t k_max, double mean);

/// Smallest k_max with poisson_tail_bound(k_max, mean) < bound.
[[nodiscard]] std::uint64_t poisson_truncation_point(double mean, double bound);

/// Pr(max(N(left), N(right)) = n) for two independent Poisson(t) counts:
/// p_n^2 + 2 p_n Pr(N < n).
[[nodiscard]] double max_poisson_pmf(std::uint64_t n, double t);

/// Same law written as 2 p_n Pr(N <= n) - p_n^2.
[[nodiscard]] double max_poisson_pmf_cumulative_form(std::uint64_t n, double t);

/// Pr(H = h) at time t; also the rate of change of rho_t(h + 1).
[[nodiscard]] double height_pmf(std::uint64_t h, double t);

/// Law of H at time t truncated where the Poisson(3t) tail drops below
/// `tail` (H never exceeds the total arrival count).
[[nodiscard]] DiscreteDist<double> height_distribution(double t, double tail = 1e-16);

/// X ~ B(n, p), exact.
[[nodiscard]] DiscreteDist<Rational> binomial_distribution(std::uint32_t n, const Rational& p);

/// Y ~ NB(r, p): successes (probability p) seen before the r-th failure,
/// Pr(Y = k) = C(r+k-1, k) (1-p)^r p^k, truncated to k <= k_max.
[[nodiscard]] DiscreteDist<Rational> negative_binomial_distribution(std::uint32_t r,
                                                                   const Rational& p,
                                                                   std::uint32_t k_max);

/// Integral of x^s e^{-a x} over [0, upper] via the incomplete-gamma closed form
/// s!/a^{s+1} (1 - e^{-a upper} sum_{i<=s} (a upper)^i / i!).
[[nodiscard]] double integrate_power_exp(std::uint32_t s, double a, double upper);

// ---------------------------------------------------------------------------
// Densities

/// rho_t(r) = constant - (sum_i coefficients[i] t^i) e^{-3t}.
struct ExpPolyDensity {
  LayerIndex layer = 1;
  Rational constant;
  std::vector<Rational> coefficients;

  [[nodiscard]] std::size_t degree() const {
    return coefficients.empty() ? 0 : coefficients.size() - 1;
  }
  /// Horner on 256-bit floats; e^{-3t} is applied last in double.
  [[nodiscard]] double evaluate(double t) const;
};

/// Exact closed form of rho_t(r), obtained by integrating Pr(H = r - 1)
/// term by term. Coefficients grow quickly: r = 50 already has numerators
/// with hundreds of digits.
[[nodiscard]] ExpPolyDensity density_symbolic(LayerIndex r);

/// rho_t(r) for r >= 1, t >= 0. Uses a per-layer cache of the symbolic form.
[[nodiscard]] double density_time(LayerIndex r, double t);

/// lim_{t -> inf} rho_t(r), exact. Denominator divides 3^{2r-1}.
[[nodiscard]] Rational end_density(LayerIndex r);

/// End-density as collision + remainder with X ~ B(r-1, 1/2), Y ~ NB(r, 1/3):
///   collision = 1/2 Pr(X = Y),   remainder = sum_k Pr(X = k) Pr(Y < k).
struct EndDensitySplit {
  Rational collision;
  Rational remainder;

  [[nodiscard]] Rational total() const { return collision + remainder; }
};

[[nodiscard]] EndDensitySplit end_density_split(LayerIndex r);

struct LimitRow {
  LayerIndex layer = 0;
  Rational end_density;
  double decimal = 0.0;
  double gap_to_half = 0.0;
  Rational collision;
  Rational remainder;
};

struct LimitDiagnostics {
  std::vector<LimitRow> rows;
  bool strictly_increasing = true;
  bool gap_strictly_decreasing = true;
  bool below_half = true;
  bool split_consistent = true;

  [[nodiscard]] bool ok() const {
    return strictly_increasing && gap_strictly_decreasing && below_half && split_consistent;
  }
};

/// Rows for layers 1..r_max plus the trend checks toward 1/2.
[[nodiscard]] LimitDiagnostics limit_diagnostics(LayerIndex r_max);

}  // namespace mlpark
