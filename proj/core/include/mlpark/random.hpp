#pragma once

// Deterministic random streams for the simulator.
//
// Every replication draws from its own xoshiro256++ generator keyed by
// (seed, replication index), so results do not depend on how replications
// are scheduled across threads. Sampling routines are implemented here
// rather than through <random> distributions, whose output is
// implementation-defined.

#include <array>
#include <cstdint>
#include <limits>

namespace mlpark {

/// SplitMix64 step; used for seeding and stream derivation.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t& state);

class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

/// Generator for replication `index` of a run seeded with `seed`.
[[nodiscard]] Xoshiro256pp replication_stream(std::uint64_t seed, std::uint64_t index);

__extension__ using uint128 = unsigned __int128;

/// Uniform integer in [0, bound) by Lemire's multiply-and-reject. bound > 0.
template <class Rng>
[[nodiscard]] std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  uint128 m = static_cast<uint128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<uint128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
[[nodiscard]] double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Poisson(mean) variate. Sequential-search inversion for mean <= 30,
/// Hormann's transformed rejection (PTRS) above.
[[nodiscard]] std::uint64_t sample_poisson(Xoshiro256pp& rng, double mean);

inline constexpr double kPoissonInversionLimit = 30.0;

}  // namespace mlpark
