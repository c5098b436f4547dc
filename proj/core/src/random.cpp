#include "mlpark/random.hpp"

#include <cmath>

#include "mlpark/errors.hpp"

namespace mlpark {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

Xoshiro256pp replication_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t mix = seed;
  const std::uint64_t a = splitmix64(mix);
  std::uint64_t key = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return Xoshiro256pp(splitmix64(key));
}

namespace {

std::uint64_t poisson_inversion(Xoshiro256pp& rng, double mean) {
  const double u = uniform_unit(rng);
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  // The cap only triggers when rounding leaves cdf a hair below u.
  while (u > cdf && k < 1000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

std::uint64_t poisson_ptrs(Xoshiro256pp& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = uniform_unit(rng) - 0.5;
    const double v = uniform_unit(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t sample_poisson(Xoshiro256pp& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw InputError("Poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  return mean <= kPoissonInversionLimit ? poisson_inversion(rng, mean) : poisson_ptrs(rng, mean);
}

}  // namespace mlpark
