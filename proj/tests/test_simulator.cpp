#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mlpark/analytic.hpp"
#include "mlpark/errors.hpp"
#include "mlpark/oracle.hpp"
#include "mlpark/simulator.hpp"
#include "mlpark/stats.hpp"

namespace mlpark {
namespace {

constexpr SiteIndex kCenter = 1;

RunConfig fixed_time(double t, std::uint64_t reps, LayerIndex layers = 4) {
  RunConfig c;
  c.mode = FixedTime{t};
  c.replications = reps;
  c.max_layer = layers;
  c.seed = 11;
  return c;
}

RunConfig fixed_arrivals(std::uint64_t m, std::uint64_t reps, LayerIndex layers = 4) {
  RunConfig c;
  c.mode = FixedArrivals{m};
  c.replications = reps;
  c.max_layer = layers;
  c.seed = 12;
  return c;
}

// --------------------------------------------------------------- sampling

TEST(Sampling, EmptySequences) {
  auto rng = replication_stream(1, 0);
  EXPECT_TRUE(sample_arrivals_fixed_time(3, 0.0, rng).empty());
  EXPECT_TRUE(sample_arrivals_fixed_count(3, 0, rng).empty());
  EXPECT_THROW((void)sample_arrivals_fixed_time(3, -1.0, rng), InputError);
  EXPECT_THROW((void)sample_arrivals_fixed_count(0, 4, rng), InputError);
}

TEST(Sampling, FixedTimeCounts) {
  const int reps = 40000;
  int empty = 0;
  double total = 0.0;
  for (int i = 0; i < reps; ++i) {
    auto rng = replication_stream(5, i);
    const auto seq = sample_arrivals_fixed_time(3, 1.0, rng);
    if (seq.empty()) ++empty;
    total += static_cast<double>(seq.size());
    for (auto x : seq) ASSERT_LT(x, 3u);
  }
  const double p = std::exp(-3.0);
  EXPECT_NEAR(empty / double(reps), p, 4 * std::sqrt(p * (1 - p) / reps));
  EXPECT_NEAR(total / reps, 3.0, 4 * std::sqrt(3.0 / reps));
}

TEST(Sampling, FixedCountLabelsAreUniform) {
  auto rng = replication_stream(6, 0);
  const auto seq = sample_arrivals_fixed_count(3, 90000, rng);
  std::vector<double> counts(3, 0.0);
  for (auto x : seq) counts.at(x) += 1;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - 30000) * (c - 30000) / 30000;
  EXPECT_LT(chi2, 13.8);  // 2 dof, p = 0.001
}

TEST(Sampling, ShuffleIsUniformGivenCounts) {
  // With one arrival per site, all 6 orders are equally likely.
  std::vector<double> orders(27, 0.0);
  int seen = 0;
  for (int i = 0; seen < 30000; ++i) {
    auto rng = replication_stream(7, i);
    const auto seq = sample_arrivals_fixed_time(3, 1.0, rng);
    std::vector<int> per(3, 0);
    for (auto x : seq) ++per[x];
    if (seq.size() != 3 || per != std::vector<int>{1, 1, 1}) continue;
    orders[seq[0] * 9 + seq[1] * 3 + seq[2]] += 1;
    ++seen;
  }
  double chi2 = 0.0;
  for (double c : orders) {
    if (c > 0) chi2 += (c - 5000) * (c - 5000) / 5000;
  }
  EXPECT_EQ(std::count_if(orders.begin(), orders.end(), [](double c) { return c > 0; }), 6);
  EXPECT_LT(chi2, 20.5);  // 5 dof, p = 0.001
}

// --------------------------------------------------------------- config

TEST(RunConfig, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_sites = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = RunConfig{};
  c.replications = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = RunConfig{};
  c.max_layer = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = RunConfig{};
  c.mode = FixedTime{-0.1};
  EXPECT_THROW(c.validate(), InputError);
  c.mode = FixedTime{std::nan("")};
  EXPECT_THROW(c.validate(), InputError);
  c = RunConfig{};
  c.mode = FixedArrivals{0};
  EXPECT_THROW(c.validate(), InputError);
  c = RunConfig{};
  c.observe_sites = {3};
  EXPECT_THROW(c.validate(), InputError);
}

TEST(RunConfig, CenterSites) {
  EXPECT_EQ(center_sites(3), (std::vector<SiteIndex>{1}));
  EXPECT_EQ(center_sites(9), (std::vector<SiteIndex>{4}));
  EXPECT_EQ(center_sites(4), (std::vector<SiteIndex>{1, 2}));
  EXPECT_EQ(center_sites(1), (std::vector<SiteIndex>{0}));
  EXPECT_EQ(recommended_arrivals(3, 5), 600u);
  EXPECT_EQ(recommended_arrivals(25, 12), 6000u);
}

// ------------------------------------------------------------ estimates

TEST(Run, FirstArrivalSettlesOnLayerOne) {
  const auto result = run(fixed_arrivals(1, 3000, 3));
  EXPECT_NEAR(result.at(kCenter, 1).mean, 1.0 / 3, 4 * std::sqrt(2.0 / 9 / 3000));
  EXPECT_EQ(result.at(kCenter, 2).occupied, 0u);
  EXPECT_EQ(result.at(kCenter, 3).occupied, 0u);
}

TEST(Run, FixedTimeFirstLayer) {
  const auto result = run(fixed_time(1.0, 40000));
  const double expected = density_time(1, 1.0);
  EXPECT_NEAR(expected, 0.31674, 1e-5);
  for (LayerIndex r = 1; r <= 4; ++r) {
    const auto& e = result.at(kCenter, r);
    EXPECT_NEAR(e.mean, density_time(r, 1.0), 4 * e.standard_error + 1e-9) << r;
  }
}

TEST(Run, EndDensitiesAfterManyArrivals) {
  const auto result = run(fixed_arrivals(600, 20000));
  for (LayerIndex r = 1; r <= 4; ++r) {
    const auto& e = result.at(kCenter, r);
    EXPECT_NEAR(e.mean, end_density(r).get_d(), 4 * e.standard_error) << r;
  }
  EXPECT_TRUE(result.warnings.empty());
}

TEST(Run, MatchesExactOccupancyAfterFewArrivals) {
  const auto exact = exact_after_m_arrivals(4, 6);
  RunConfig c = fixed_arrivals(6, 30000, 3);
  c.n_sites = 4;
  c.observe_sites = {0, 1, 2, 3};
  const auto result = run(c);
  for (SiteIndex x = 0; x < 4; ++x) {
    for (LayerIndex r = 1; r <= 3; ++r) {
      const double p = exact.at(x, r).get_d();
      const double se = std::sqrt(p * (1 - p) / 30000);
      EXPECT_NEAR(result.at(x, r).mean, p, 4 * se + 1e-12) << x << " " << r;
    }
  }
}

TEST(Run, PlateauUnderDoubledArrivals) {
  const auto a = run(fixed_arrivals(600, 20000));
  const auto b = run(fixed_arrivals(1200, 20000));
  for (LayerIndex r = 1; r <= 4; ++r) {
    const auto& x = a.at(kCenter, r);
    const auto& y = b.at(kCenter, r);
    EXPECT_NEAR(x.mean, y.mean, 4 * std::hypot(x.standard_error, y.standard_error)) << r;
  }
}

TEST(Run, HeightLawAtFixedTime) {
  const auto result = run(fixed_time(1.0, 40000, 1));
  EXPECT_EQ(result.height_checks, 40000u);
  EXPECT_EQ(result.height_violations, 0u);
  const auto total = std::accumulate(result.height_histogram.begin(),
                                     result.height_histogram.end(), std::uint64_t{0});
  EXPECT_EQ(total, 40000u);
  for (std::uint64_t h = 0; h <= 5; ++h) {
    const double p = height_pmf(h, 1.0);
    const double observed = h < result.height_histogram.size()
                                ? static_cast<double>(result.height_histogram[h]) / 40000
                                : 0.0;
    EXPECT_NEAR(observed, p, 4 * std::sqrt(p * (1 - p) / 40000)) << h;
  }
}

TEST(Run, IdenticalAcrossThreadCounts) {
  RunConfig c = fixed_time(2.0, 3000, 6);
  c.n_sites = 7;
  c.observe_sites = {0, 3, 6};
  c.threads = 1;
  const auto one = run(c);
  c.threads = 3;
  const auto three = run(c);
  ASSERT_EQ(one.estimates.size(), three.estimates.size());
  for (std::size_t i = 0; i < one.estimates.size(); ++i) {
    EXPECT_EQ(one.estimates[i].occupied, three.estimates[i].occupied);
  }
}

TEST(Run, SeedChangesResult) {
  RunConfig c = fixed_time(2.0, 2000, 3);
  const auto a = run(c);
  c.seed += 1;
  const auto b = run(c);
  bool differs = false;
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    differs = differs || a.estimates[i].occupied != b.estimates[i].occupied;
  }
  EXPECT_TRUE(differs);
}

TEST(Run, WarnsOnShortArrivalBudget) {
  const auto result = run(fixed_arrivals(100, 10, 4));
  ASSERT_EQ(result.warnings.size(), 1u);
  EXPECT_NE(result.warnings[0].find("240"), std::string::npos);
}

TEST(Run, UnknownEstimate) {
  const auto result = run(fixed_arrivals(10, 1, 2));
  EXPECT_THROW((void)result.at(0, 1), InputError);
  EXPECT_THROW((void)result.at(kCenter, 3), InputError);
}

TEST(Run, EvenLatticeCenterProfileAveragesMiddleSites) {
  RunConfig c = fixed_arrivals(400, 500, 3);
  c.n_sites = 6;
  const auto result = run(c);
  const auto profile = center_profile(result);
  ASSERT_EQ(profile.size(), 3u);
  for (LayerIndex r = 1; r <= 3; ++r) {
    EXPECT_DOUBLE_EQ(profile[r - 1], (result.at(2, r).mean + result.at(3, r).mean) / 2);
  }
}

// --------------------------------------------------------------- raises

TEST(Raises, SingleArrivalAlwaysRaises) {
  const auto stats = raise_fraction(fixed_arrivals(1, 500));
  EXPECT_EQ(stats.raised, 500u);
  EXPECT_EQ(stats.total, 500u);
  EXPECT_DOUBLE_EQ(stats.raise_fraction(), 1.0);
}

TEST(Raises, FractionApproachesTwoThirds) {
  const auto stats = raise_fraction(fixed_arrivals(30000, 100));
  EXPECT_NEAR(stats.raise_fraction(), 2.0 / 3, 0.005);
}

TEST(Raises, SideDifferenceGrowsLikeSquareRoot) {
  const auto a = raise_fraction(fixed_arrivals(10000, 400));
  const auto b = raise_fraction(fixed_arrivals(40000, 400));
  EXPECT_NEAR(b.mean_abs_side_difference() / a.mean_abs_side_difference(), 2.0, 0.3);
}

TEST(Raises, RejectsUnsupportedSetups) {
  RunConfig c = fixed_arrivals(10, 1);
  c.n_sites = 5;
  EXPECT_THROW((void)raise_fraction(c), UnsupportedConfiguration);
  c.track_raises = true;
  EXPECT_THROW((void)run(c), UnsupportedConfiguration);
  EXPECT_THROW((void)raise_fraction(fixed_time(1.0, 1)), UnsupportedConfiguration);
}

// -------------------------------------------------------------- trend test

TEST(MannKendall, StrictlyIncreasing) {
  std::vector<double> v(10);
  std::iota(v.begin(), v.end(), 0.0);
  const auto test = mann_kendall(v);
  EXPECT_EQ(test.s, 45);
  EXPECT_DOUBLE_EQ(test.variance, 125.0);
  EXPECT_NEAR(test.z, 44.0 / std::sqrt(125.0), 1e-12);
  EXPECT_TRUE(test.increasing_at(0.05));
}

TEST(MannKendall, DecreasingAndFlat) {
  const std::vector<double> down = {5, 4, 3, 2, 1};
  EXPECT_EQ(mann_kendall(down).s, -10);
  EXPECT_FALSE(mann_kendall(down).increasing_at(0.05));
  const std::vector<double> flat = {1, 1, 1, 1};
  EXPECT_EQ(mann_kendall(flat).s, 0);
  EXPECT_EQ(mann_kendall(flat).variance, 0.0);
  EXPECT_FALSE(mann_kendall(flat).increasing_at(0.05));
}

TEST(MannKendall, TieCorrection) {
  const std::vector<double> v = {1, 2, 2, 3};
  const auto test = mann_kendall(v);
  EXPECT_EQ(test.s, 5);
  // n(n-1)(2n+5)/18 minus one tied pair 2*1*9/18.
  EXPECT_DOUBLE_EQ(test.variance, (4.0 * 3 * 13 - 18) / 18);
}

TEST(Stats, NormalTailAndThreshold) {
  EXPECT_NEAR(normal_upper_tail(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_upper_tail(1.6448536269514722), 0.05, 1e-12);
  const std::vector<double> v = {0.3, 0.44, 0.451, 0.46};
  EXPECT_EQ(first_index_above(v, 0.45), 3u);
  EXPECT_FALSE(first_index_above(v, 0.5).has_value());
}

}  // namespace
}  // namespace mlpark
