#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "mlpark/analytic.hpp"
#include "mlpark/errors.hpp"
#include "test_oracles.hpp"

namespace mlpark {
namespace {

using testing::brute_force_height_pmf;
using testing::brute_force_max_pmf;
using testing::exact_poisson_pmf;
using testing::integrate;

Rational q(const char* text) { return parse_fraction(text); }

// ---------------------------------------------------------------- Poisson

TEST(PoissonPmf, SmallCases) {
  EXPECT_EQ(poisson_pmf(0, 0.0), 1.0);
  EXPECT_EQ(poisson_pmf(3, 0.0), 0.0);
  EXPECT_NEAR(poisson_pmf(1, 1.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(poisson_pmf(1, 1.0), 0.367879, 1e-6);
}

TEST(PoissonPmf, LargeArgumentsAgainstExactRational) {
  const double exact = exact_poisson_pmf(100, 50);
  EXPECT_NEAR(exact, 1.630319352147730026e-10, 1e-25);
  EXPECT_NEAR(poisson_pmf(100, 50.0) / exact, 1.0, 1e-14);
  for (unsigned k : {0u, 7u, 49u, 50u, 51u, 140u}) {
    EXPECT_NEAR(poisson_pmf(k, 50.0) / exact_poisson_pmf(k, 50), 1.0, 1e-14) << k;
  }
}

TEST(PoissonPmf, RejectsNegativeTime) {
  EXPECT_THROW((void)poisson_pmf(1, -0.5), InputError);
  EXPECT_THROW((void)max_poisson_pmf(1, -0.5), InputError);
  EXPECT_THROW((void)height_pmf(1, -0.5), InputError);
  EXPECT_THROW((void)density_time(1, -0.5), InputError);
}

TEST(PoissonTail, BoundDominatesTrueTail) {
  for (double mean : {0.5, 3.0, 9.0}) {
    for (std::uint64_t k = 10; k < 40; k += 3) {
      double tail = 0.0;
      for (std::uint64_t j = k + 1; j < k + 200; ++j) tail += poisson_pmf(j, mean);
      EXPECT_GE(poisson_tail_bound(k, mean) * (1 + 1e-12), tail);
    }
  }
  const auto k = poisson_truncation_point(3.0, 1e-16);
  EXPECT_LT(poisson_tail_bound(k, 3.0), 1e-16);
  EXPECT_GE(poisson_tail_bound(k - 1, 3.0), 1e-16);
}

// ------------------------------------------------------ max of two Poissons

TEST(MaxPoisson, ZeroMeansBothEmpty) {
  for (double t : {0.0, 0.3, 1.0, 4.0}) {
    EXPECT_NEAR(max_poisson_pmf(0, t), std::exp(-2 * t), 1e-15);
  }
}

TEST(MaxPoisson, Normalization) {
  double total = 0.0;
  for (std::uint64_t n = 0; n <= 60; ++n) total += max_poisson_pmf(n, 1.0);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(MaxPoisson, AgainstTruncatedDoubleSum) {
  EXPECT_NEAR(max_poisson_pmf(2, 1.5), brute_force_max_pmf(2, 1.5), 1e-12);
  EXPECT_NEAR(max_poisson_pmf(2, 1.5), 0.34306401797231248, 1e-12);
  for (unsigned n = 0; n < 12; ++n) {
    EXPECT_NEAR(max_poisson_pmf(n, 3.7), brute_force_max_pmf(n, 3.7), 1e-12) << n;
  }
}

TEST(MaxPoisson, CumulativeFormAgrees) {
  for (double t : {0.3, 1.5, 7.0}) {
    for (std::uint64_t n = 0; n <= 30; ++n) {
      EXPECT_NEAR(max_poisson_pmf(n, t), max_poisson_pmf_cumulative_form(n, t), 1e-15);
    }
  }
}

// ------------------------------------------------------------- height law

TEST(HeightPmf, NoArrivals) {
  for (double t : {0.0, 0.2, 1.0, 3.0}) EXPECT_NEAR(height_pmf(0, t), std::exp(-3 * t), 1e-16);
}

TEST(HeightPmf, AgainstTripleSum) {
  EXPECT_NEAR(height_pmf(3, 1.0), 0.23787154886868328, 1e-14);
  for (unsigned h = 0; h <= 8; ++h) {
    for (double t : {0.4, 1.0, 2.5}) {
      EXPECT_NEAR(height_pmf(h, t), brute_force_height_pmf(h, t), 1e-14) << h << " " << t;
    }
  }
}

TEST(HeightPmf, Normalization) {
  double total = 0.0;
  for (std::uint64_t h = 0; h <= 80; ++h) total += height_pmf(h, 2.0);
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (double t : {0.1, 1.0, 5.0, 10.0}) {
    const auto dist = height_distribution(t);
    EXPECT_LT(dist.tail_bound, 1e-16);
    EXPECT_NEAR(dist.mass() + dist.tail_bound, 1.0, 1e-12) << t;
    for (std::size_t h = 0; h < dist.probabilities.size(); h += 7) {
      EXPECT_NEAR(dist.probabilities[h], height_pmf(h, t), 1e-15);
    }
  }
  const auto at_zero = height_distribution(0.0);
  EXPECT_EQ(at_zero.probabilities.size(), 1u);
  EXPECT_EQ(at_zero.probabilities[0], 1.0);
}

// -------------------------------------------------------- time densities

TEST(DensityTime, FirstLayer) {
  for (double t : {0.0, 0.01, 0.5, 1.0, 5.0, 40.0}) {
    EXPECT_NEAR(density_time(1, t), 1.0 / 3 - std::exp(-3 * t) / 3, 1e-16) << t;
  }
}

TEST(DensityTime, SecondLayerAtOne) {
  EXPECT_NEAR(density_time(2, 1.0), 11.0 / 27 - 53.0 / 27 * std::exp(-3.0), 1e-15);
  EXPECT_NEAR(density_time(2, 1.0), 0.30967723616678559, 1e-15);
}

TEST(DensityTime, EmptyAtTimeZero) {
  for (LayerIndex r = 1; r <= 12; ++r) EXPECT_NEAR(density_time(r, 0.0), 0.0, 1e-16);
}

TEST(DensityTime, ThirdLayerAgainstQuadrature) {
  const double quad = integrate([](double s) { return height_pmf(2, s); }, 0.0, 2.5);
  EXPECT_NEAR(quad, 0.41482394757089381, 1e-12);
  EXPECT_NEAR(density_time(3, 2.5), quad, 1e-9);
}

TEST(DensityTime, DerivativeIsHeightLaw) {
  const double step = 1e-4;
  for (LayerIndex r = 1; r <= 6; ++r) {
    for (double t : {0.5, 1.0, 2.0}) {
      const double fd = (density_time(r, t + step) - density_time(r, t - step)) / (2 * step);
      EXPECT_NEAR(fd, height_pmf(r - 1, t), 1e-6) << r << " " << t;
    }
  }
}

TEST(DensityTime, DeepLayersStayInRange) {
  for (LayerIndex r : {20u, 50u}) {
    const double limit = end_density(r).get_d();
    double previous = 0.0;
    for (double t : {0.0, 0.1, 1.0, 10.0, 30.0, 100.0, 300.0}) {
      const double v = density_time(r, t);
      EXPECT_GE(v, previous - 1e-15);
      EXPECT_GE(v, -1e-15);
      EXPECT_LE(v, limit + 1e-15);
      previous = v;
    }
    EXPECT_NEAR(density_time(r, 300.0), limit, 1e-15);
  }
}

// -------------------------------------------------------- symbolic forms

void expect_coefficients(LayerIndex r, const std::vector<const char*>& expected) {
  const auto form = density_symbolic(r);
  EXPECT_EQ(form.constant, q(expected[0])) << "layer " << r;
  ASSERT_GE(form.coefficients.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(form.coefficients[i], q(expected[i])) << "layer " << r << " t^" << i;
  }
}

TEST(DensitySymbolic, KnownClosedForms) {
  expect_coefficients(1, {"1/3"});
  expect_coefficients(2, {"11/27", "11/9", "1/3"});
  expect_coefficients(3, {"35/81", "35/27", "35/18", "7/9", "1/12"});
  expect_coefficients(4, {"971/2187", "971/729", "971/486", "971/486", "283/324", "17/108"});
  EXPECT_EQ(density_symbolic(1).degree(), 0u);
  EXPECT_EQ(density_symbolic(2).degree(), 2u);
  EXPECT_EQ(density_symbolic(3).degree(), 4u);
}

TEST(DensitySymbolic, FourthLayerCarriesSixthPowerTerm) {
  // The leading coefficient is 1/(3 h!^2); for layer 4 that is 1/108. The
  // derivative test above fails without it.
  const auto form = density_symbolic(4);
  ASSERT_EQ(form.degree(), 6u);
  EXPECT_EQ(form.coefficients[6], q("1/108"));
}

TEST(DensitySymbolic, FifthLayer) {
  const auto form = density_symbolic(5);
  EXPECT_EQ(form.constant, q("8881/19683"));
  const double quad = integrate([](double s) { return height_pmf(4, s); }, 0.0, 1.0);
  EXPECT_NEAR(quad, 0.042603792748646188, 1e-13);
  EXPECT_NEAR(form.evaluate(1.0), quad, 1e-10);
}

TEST(DensitySymbolic, StructuralInvariants) {
  for (LayerIndex r = 1; r <= 30; ++r) {
    const auto form = density_symbolic(r);
    EXPECT_EQ(form.degree(), 2u * (r - 1));
    EXPECT_EQ(form.coefficients.front(), form.constant);
    for (const auto& c : form.coefficients) EXPECT_GT(c, 0);
    // Leading coefficient 1 / (3 h!^2).
    BigInt hf;
    mpz_fac_ui(hf.get_mpz_t(), r - 1);
    EXPECT_EQ(form.coefficients.back(), Rational(1, 3 * hf * hf));
    for (double t : {0.0, 0.3, 2.0, 9.0}) {
      const double v = form.evaluate(t);
      EXPECT_GE(v, -1e-16);
      EXPECT_LE(v, form.constant.get_d() + 1e-16);
    }
  }
}

TEST(DensitySymbolic, ConstantMatchesEndDensityExactly) {
  for (LayerIndex r = 1; r <= 100; ++r) {
    ASSERT_EQ(density_symbolic(r).constant, end_density(r)) << r;
  }
}

TEST(DensitySymbolic, RejectsLayerZero) {
  EXPECT_THROW((void)density_symbolic(0), InputError);
  EXPECT_THROW((void)end_density(0), InputError);
  EXPECT_THROW((void)density_time(0, 1.0), InputError);
}

// ----------------------------------------------------------- end-densities

TEST(EndDensity, KnownTable) {
  const std::vector<const char*> table = {
      "1/3",        "11/27",        "35/81",          "971/2187",           "8881/19683",
      "80811/177147", "733209/1594323", "6640491/14348907", "60067809/129140163",
      "542880971/1162261467"};
  for (LayerIndex r = 1; r <= 10; ++r) EXPECT_EQ(end_density(r), q(table[r - 1])) << r;
  EXPECT_EQ(to_fraction_string(end_density(4)), "971/2187");
}

TEST(EndDensity, DenominatorDividesPowerOfThree) {
  for (LayerIndex r = 1; r <= 60; ++r) {
    BigInt power;
    mpz_ui_pow_ui(power.get_mpz_t(), 3, 2 * r - 1);
    EXPECT_TRUE(mpz_divisible_p(power.get_mpz_t(), end_density(r).get_den_mpz_t())) << r;
  }
}

TEST(EndDensity, StrictlyIncreasingBelowHalf) {
  Rational previous = 0;
  for (LayerIndex r = 1; r <= 200; ++r) {
    const Rational value = end_density(r);
    ASSERT_GT(value, previous) << r;
    ASSERT_LT(value, Rational(1, 2)) << r;
    previous = value;
  }
}

TEST(EndDensitySplit, FirstLayer) {
  const auto split = end_density_split(1);
  EXPECT_EQ(split.collision, q("1/3"));
  EXPECT_EQ(split.remainder, 0);
}

TEST(EndDensitySplit, SumsToEndDensity) {
  for (LayerIndex r = 1; r <= 200; ++r) {
    ASSERT_EQ(end_density_split(r).total(), end_density(r)) << r;
  }
}

TEST(EndDensitySplit, CollisionTermDecays) {
  EXPECT_LT(end_density_split(50).collision, end_density_split(10).collision);
  Rational previous = 1;
  for (LayerIndex r = 1; r <= 200; ++r) {
    const Rational c = end_density_split(r).collision;
    ASSERT_LT(c, previous) << r;
    previous = c;
  }
}

TEST(LimitDiagnostics, RowsAndTrends) {
  const auto diag = limit_diagnostics(100);
  ASSERT_EQ(diag.rows.size(), 100u);
  EXPECT_TRUE(diag.ok());
  EXPECT_NEAR(diag.rows[1].decimal, 0.4074, 5e-5);
  EXPECT_NEAR(diag.rows[9].decimal, 0.4671, 5e-5);
  EXPECT_LT(diag.rows[99].gap_to_half, diag.rows[9].gap_to_half);
  EXPECT_LT(diag.rows[99].collision.get_d(), 0.021);
  EXPECT_LT(3 * diag.rows[99].collision, diag.rows[9].collision);
  for (const auto& row : diag.rows) {
    EXPECT_NEAR(row.decimal + row.gap_to_half, 0.5, 1e-15);
  }
}

// -------------------------------------------------- distributions, misc

TEST(Distributions, BinomialAndNegativeBinomial) {
  const auto x = binomial_distribution(9, Rational(1, 2));
  EXPECT_EQ(x.mass(), 1);
  EXPECT_EQ(x.at(4), Rational(63, 256));
  EXPECT_EQ(x.at(10), 0);
  const auto y = negative_binomial_distribution(4, Rational(1, 3), 60);
  EXPECT_EQ(y.at(0), Rational(16, 81));
  EXPECT_EQ(y.at(2), Rational(10) * Rational(16, 81) * Rational(1, 9));
  EXPECT_NEAR(y.mass().get_d() + y.tail_bound, 1.0, 1e-15);
  EXPECT_GT(y.tail_bound, 0.0);
  EXPECT_THROW((void)binomial_distribution(3, Rational(3, 2)), InputError);
  EXPECT_THROW((void)negative_binomial_distribution(0, Rational(1, 3), 5), InputError);
}

TEST(IntegratePowerExp, MatchesQuadrature) {
  for (std::uint32_t s = 0; s <= 10; ++s) {
    for (double upper : {0.5, 2.0}) {
      const double quad = integrate(
          [s](double x) { return std::pow(x, s) * std::exp(-3.0 * x); }, 0.0, upper);
      EXPECT_NEAR(integrate_power_exp(s, 3.0, upper), quad, 1e-10) << s << " " << upper;
      EXPECT_NEAR(integrate_power_exp(s, 3.0, upper) / quad, 1.0, 1e-12);
    }
  }
  EXPECT_EQ(integrate_power_exp(4, 3.0, 0.0), 0.0);
  EXPECT_THROW((void)integrate_power_exp(1, 0.0, 1.0), InputError);
}

TEST(Fractions, RenderAndParse) {
  EXPECT_EQ(to_fraction_string(Rational(6, 8)), "3/4");
  EXPECT_EQ(to_fraction_string(Rational(0)), "0/1");
  EXPECT_EQ(to_fraction_string(Rational(-5, 1)), "-5/1");
  EXPECT_EQ(parse_fraction("80811/177147"), Rational(2993, 6561));
  EXPECT_EQ(parse_fraction("7"), Rational(7));
  EXPECT_EQ(parse_fraction("-2/4"), Rational(-1, 2));
  for (const char* bad : {"", "/", "1/", "/3", "1/0", "a/2", "1/-3", "1.5"}) {
    EXPECT_THROW((void)parse_fraction(bad), InputError) << bad;
  }
}

}  // namespace
}  // namespace mlpark
