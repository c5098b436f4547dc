#include "mlpark/analytic.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "mlpark/errors.hpp"

namespace mlpark {

namespace {

constexpr mp_bitcnt_t kHornerBits = 256;

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InputError("time must be finite and non-negative, got " + std::to_string(t));
  }
}

void require_layer(LayerIndex r) {
  if (r == 0) throw InputError("layers are 1-based; layer 0 does not exist");
}

// mpq arithmetic requires canonical operands.
Rational ratio(const BigInt& num, const BigInt& den) {
  Rational out(num, den);
  out.canonicalize();
  return out;
}

Rational pow_rational(const Rational& base, std::uint32_t e) {
  BigInt num;
  BigInt den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

BigInt pow_ui(unsigned long base, unsigned long e) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, e);
  return out;
}

BigInt factorial(unsigned long n) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

// rho_t = c - P(t) e^{-3t} with P held as 256-bit floats.
struct DensityCurve {
  double constant = 0.0;
  std::vector<mpf_class> coefficients;

  explicit DensityCurve(const ExpPolyDensity& exact) {
    constant = mpf_class(exact.constant, kHornerBits).get_d();
    coefficients.reserve(exact.coefficients.size());
    for (const auto& c : exact.coefficients) coefficients.emplace_back(c, kHornerBits);
  }

  double operator()(double t) const {
    mpf_class acc(0, kHornerBits);
    const mpf_class x(t, kHornerBits);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      acc = acc * x + *it;
    }
    if (acc == 0) return constant;
    long exponent = 0;
    const double mantissa = mpf_get_d_2exp(&exponent, acc.get_mpf_t());
    const double decaying =
        mantissa * std::exp(static_cast<double>(exponent) * std::log(2.0) - 3.0 * t);
    return constant - decaying;
  }
};

std::shared_ptr<const DensityCurve> cached_curve(LayerIndex r) {
  static std::mutex mutex;
  static std::map<LayerIndex, std::shared_ptr<const DensityCurve>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(r); it != cache.end()) return it->second;
  }
  auto curve = std::make_shared<const DensityCurve>(density_symbolic(r));
  std::lock_guard lock(mutex);
  return cache.emplace(r, std::move(curve)).first->second;
}

}  // namespace

std::string to_fraction_string(const Rational& value) {
  Rational reduced = value;
  reduced.canonicalize();
  return reduced.get_num().get_str() + "/" + reduced.get_den().get_str();
}

Rational parse_fraction(std::string_view text) {
  const std::string s(text);
  const auto slash = s.find('/');
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  auto is_integer = [](const std::string& part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t i = (allow_sign && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i) {
      if (part[i] < '0' || part[i] > '9') return false;
    }
    return true;
  };
  if (!is_integer(num, true) || !is_integer(den, false)) {
    throw InputError("malformed fraction '" + s + "'");
  }
  BigInt n(num[0] == '+' ? num.substr(1) : num, 10);
  BigInt d(den, 10);
  if (d == 0) throw InputError("zero denominator in '" + s + "'");
  Rational out(n, d);
  out.canonicalize();
  return out;
}

BigInt binomial(std::uint32_t n, std::uint32_t k) {
  BigInt out;
  if (k > n) return out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

// ---------------------------------------------------------------------------

double poisson_pmf(std::uint64_t k, double t) {
  require_time(t);
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  const long double kl = static_cast<long double>(k);
  const long double log_p = kl * std::log(static_cast<long double>(t)) -
                            static_cast<long double>(t) - std::lgamma(kl + 1.0L);
  return static_cast<double>(std::exp(log_p));
}

double poisson_tail_bound(std::uint64_t k_max, double mean) {
  require_time(mean);
  if (mean == 0.0) return 0.0;
  const double next = static_cast<double>(k_max) + 2.0;
  if (next <= mean) return 1.0;
  // pmf ratios beyond k_max+1 are below mean / (k_max + 2).
  const double bound = poisson_pmf(k_max + 1, mean) / (1.0 - mean / next);
  return std::min(bound, 1.0);
}

std::uint64_t poisson_truncation_point(double mean, double bound) {
  if (!(bound > 0.0)) throw InputError("tail bound must be positive");
  auto k = static_cast<std::uint64_t>(std::ceil(mean));
  while (poisson_tail_bound(k, mean) >= bound) ++k;
  return k;
}

double max_poisson_pmf(std::uint64_t n, double t) {
  require_time(t);
  const double p = poisson_pmf(n, t);
  double below = 0.0;
  for (std::uint64_t j = 0; j < n; ++j) below += poisson_pmf(j, t);
  return p * p + 2.0 * p * below;
}

double max_poisson_pmf_cumulative_form(std::uint64_t n, double t) {
  require_time(t);
  const double p = poisson_pmf(n, t);
  double upto = 0.0;
  for (std::uint64_t j = 0; j <= n; ++j) upto += poisson_pmf(j, t);
  return 2.0 * p * upto - p * p;
}

double height_pmf(std::uint64_t h, double t) {
  require_time(t);
  // Convolution of N(center) with max(N(left), N(right)).
  std::vector<double> pmf(h + 1);
  for (std::uint64_t j = 0; j <= h; ++j) pmf[j] = poisson_pmf(j, t);
  double below = 0.0;
  double total = 0.0;
  for (std::uint64_t k = 0; k <= h; ++k) {
    const double max_k = pmf[k] * pmf[k] + 2.0 * pmf[k] * below;
    total += pmf[h - k] * max_k;
    below += pmf[k];
  }
  return total;
}

DiscreteDist<double> height_distribution(double t, double tail) {
  require_time(t);
  const std::uint64_t h_max = t == 0.0 ? 0 : poisson_truncation_point(3.0 * t, tail);
  std::vector<double> pmf(h_max + 1);
  for (std::uint64_t j = 0; j <= h_max; ++j) pmf[j] = poisson_pmf(j, t);
  std::vector<double> max_pmf(h_max + 1);
  double below = 0.0;
  for (std::uint64_t k = 0; k <= h_max; ++k) {
    max_pmf[k] = pmf[k] * pmf[k] + 2.0 * pmf[k] * below;
    below += pmf[k];
  }
  DiscreteDist<double> dist;
  dist.probabilities.assign(h_max + 1, 0.0);
  for (std::uint64_t h = 0; h <= h_max; ++h) {
    double total = 0.0;
    for (std::uint64_t k = 0; k <= h; ++k) total += pmf[h - k] * max_pmf[k];
    dist.probabilities[h] = total;
  }
  dist.tail_bound = t == 0.0 ? 0.0 : poisson_tail_bound(h_max, 3.0 * t);
  return dist;
}

DiscreteDist<Rational> binomial_distribution(std::uint32_t n, const Rational& p) {
  if (p < 0 || p > 1) throw InputError("probability outside [0, 1]");
  const Rational q = 1 - p;
  DiscreteDist<Rational> dist;
  dist.probabilities.reserve(n + 1);
  for (std::uint32_t k = 0; k <= n; ++k) {
    dist.probabilities.emplace_back(Rational(binomial(n, k)) * pow_rational(p, k) *
                                    pow_rational(q, n - k));
  }
  return dist;
}

DiscreteDist<Rational> negative_binomial_distribution(std::uint32_t r, const Rational& p,
                                                      std::uint32_t k_max) {
  if (p < 0 || p >= 1) throw InputError("success probability must lie in [0, 1)");
  if (r == 0) throw InputError("negative binomial needs r >= 1");
  const Rational q_r = pow_rational(1 - p, r);
  DiscreteDist<Rational> dist;
  dist.probabilities.reserve(k_max + 1);
  Rational p_k = 1;
  Rational mass = 0;
  for (std::uint32_t k = 0; k <= k_max; ++k) {
    dist.probabilities.emplace_back(Rational(binomial(r + k - 1, k)) * q_r * p_k);
    mass += dist.probabilities.back();
    p_k *= p;
  }
  dist.tail_bound = Rational(1 - mass).get_d();
  return dist;
}

double integrate_power_exp(std::uint32_t s, double a, double upper) {
  if (!(a > 0.0)) throw InputError("decay rate must be positive");
  require_time(upper);
  const double x = a * upper;
  const double scale = std::exp(std::lgamma(s + 1.0) - (s + 1.0) * std::log(a));
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) {
    // 1 - e^{-x} sum_{i<=s} x^i/i! = e^{-x} sum_{i>s} x^i/i!; avoids cancellation.
    double term = std::exp(-x + (s + 1.0) * std::log(x) - std::lgamma(s + 2.0));
    double sum = 0.0;
    for (std::uint32_t i = s + 1; term > sum * 1e-18; ++i) {
      sum += term;
      term *= x / (i + 1.0);
    }
    return scale * sum;
  }
  double partial = 0.0;
  double term = 1.0;
  for (std::uint32_t i = 0; i <= s; ++i) {
    partial += term;
    term *= x / (i + 1.0);
  }
  return scale * (1.0 - std::exp(-x) * partial);
}

// ---------------------------------------------------------------------------

double ExpPolyDensity::evaluate(double t) const {
  require_time(t);
  return DensityCurve(*this)(t);
}

ExpPolyDensity density_symbolic(LayerIndex r) {
  require_layer(r);
  const std::uint32_t h = r - 1;

  // Pr(H = h) = e^{-3t} sum_s q_s t^s with s = h + j, 0 <= j <= h:
  //   q_{h+j} = [ 2 sum_{k>j} 1/(k!(h-k)!) + 1/(j!(h-j)!) ] / j!
  std::vector<Rational> inv_split(h + 1);  // 1 / (k! (h-k)!)
  for (std::uint32_t k = 0; k <= h; ++k) {
    inv_split[k] = ratio(1, factorial(k) * factorial(h - k));
  }
  std::vector<Rational> q(2 * h + 1);
  Rational upper_sum = 0;  // sum_{k>j} inv_split[k]
  for (std::uint32_t jj = h + 1; jj-- > 0;) {
    q[h + jj] = (2 * upper_sum + inv_split[jj]) / Rational(factorial(jj));
    upper_sum += inv_split[jj];
  }

  // Integrate each t^s e^{-3t} from 0 with
  //   int_0^t x^s e^{-3x} dx = s!/3^{s+1} (1 - e^{-3t} sum_{i<=s} (3t)^i/i!).
  // a_s = q_s s!/3^{s+1}; the t^i coefficient is 3^i/i! sum_{s>=i} a_s.
  const std::size_t degree = 2 * h;
  std::vector<Rational> weight(degree + 1);
  for (std::uint32_t s = h; s <= degree; ++s) {
    weight[s] = q[s] * ratio(factorial(s), pow_ui(3, s + 1));
  }
  ExpPolyDensity out;
  out.layer = r;
  out.coefficients.resize(degree + 1);
  Rational suffix = 0;
  for (std::size_t i = degree + 1; i-- > 0;) {
    suffix += weight[i];
    out.coefficients[i] = suffix * ratio(pow_ui(3, i), factorial(i));
  }
  out.constant = suffix;
  return out;
}

double density_time(LayerIndex r, double t) {
  require_layer(r);
  require_time(t);
  return (*cached_curve(r))(t);
}

Rational end_density(LayerIndex r) {
  require_layer(r);
  const std::uint32_t h = r - 1;
  // Scaled by 3^{2h+1}:
  //   sum_k C(h,k) [ C(h+k,k) 3^{h-k} + 2 sum_{j<k} C(h+j,j) 3^{h-j} ]
  BigInt numerator = 0;
  BigInt prefix = 0;  // sum_{j<k} C(h+j,j) 3^{h-j}
  for (std::uint32_t k = 0; k <= h; ++k) {
    const BigInt diagonal = binomial(h + k, k) * pow_ui(3, h - k);
    numerator += binomial(h, k) * (diagonal + 2 * prefix);
    prefix += diagonal;
  }
  Rational out(numerator, pow_ui(3, 2 * h + 1));
  out.canonicalize();
  return out;
}

EndDensitySplit end_density_split(LayerIndex r) {
  require_layer(r);
  const auto x = binomial_distribution(r - 1, Rational(1, 2));
  const auto y = negative_binomial_distribution(r, Rational(1, 3), r - 1);
  EndDensitySplit split;
  Rational y_below = 0;  // Pr(Y < k)
  for (std::uint32_t k = 0; k < r; ++k) {
    split.collision += x.probabilities[k] * y.probabilities[k];
    split.remainder += x.probabilities[k] * y_below;
    y_below += y.probabilities[k];
  }
  split.collision /= 2;
  return split;
}

LimitDiagnostics limit_diagnostics(LayerIndex r_max) {
  require_layer(r_max);
  LimitDiagnostics diag;
  diag.rows.reserve(r_max);
  const Rational half(1, 2);
  for (LayerIndex r = 1; r <= r_max; ++r) {
    LimitRow row;
    row.layer = r;
    row.end_density = end_density(r);
    const auto split = end_density_split(r);
    row.collision = split.collision;
    row.remainder = split.remainder;
    row.decimal = mpf_class(row.end_density, kHornerBits).get_d();
    row.gap_to_half = mpf_class(half - row.end_density, kHornerBits).get_d();
    if (split.total() != row.end_density) diag.split_consistent = false;
    if (row.end_density >= half) diag.below_half = false;
    if (!diag.rows.empty()) {
      const auto& prev = diag.rows.back();
      if (row.end_density <= prev.end_density) diag.strictly_increasing = false;
      // gap_{r} < gap_{r-1} is the same comparison in exact arithmetic.
      if (half - row.end_density >= half - prev.end_density) diag.gap_strictly_decreasing = false;
    }
    diag.rows.push_back(std::move(row));
  }
  return diag;
}

}  // namespace mlpark
