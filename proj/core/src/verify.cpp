#include "mlpark/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <sstream>

#include "mlpark/io.hpp"
#include "mlpark/oracle.hpp"
#include "mlpark/simulator.hpp"

namespace mlpark {

namespace {

// Reference closed forms for layers 1..4: constant followed by the
// polynomial coefficients of the e^{-3t} factor.
const std::vector<std::vector<std::string>>& reference_layer_forms() {
  static const std::vector<std::vector<std::string>> forms = {
      {"1/3"},
      {"11/27", "11/9", "1/3"},
      {"35/81", "35/27", "35/18", "7/9", "1/12"},
      {"971/2187", "971/729", "971/486", "971/486", "283/324", "17/108"},
  };
  return forms;
}

VerifyCheck make_check(std::string name, double measured, double tolerance,
                       std::string detail = {}) {
  VerifyCheck c;
  c.name = std::move(name);
  c.measured = measured;
  c.tolerance = tolerance;
  c.passed = measured <= tolerance;
  c.detail = std::move(detail);
  return c;
}

VerifyCheck check_table(const VerifyHooks& hooks) {
  int mismatches = 0;
  std::string detail;
  const auto& table = reference_end_densities();
  for (LayerIndex r = 1; r <= table.size(); ++r) {
    const Rational got = hooks.end_density(r);
    if (got != parse_fraction(table[r - 1])) {
      ++mismatches;
      detail += fmt::format("layer {}: {} != {}; ", r, to_fraction_string(got), table[r - 1]);
    }
  }
  return make_check("end-density table, layers 1-10 (exact)", mismatches, 0, detail);
}

VerifyCheck check_golden_forms() {
  int mismatches = 0;
  std::string detail;
  const auto& forms = reference_layer_forms();
  for (LayerIndex r = 1; r <= forms.size(); ++r) {
    const auto exact = density_symbolic(r);
    if (exact.constant != parse_fraction(forms[r - 1][0])) ++mismatches;
    for (std::size_t i = 0; i < forms[r - 1].size(); ++i) {
      if (i >= exact.coefficients.size() ||
          exact.coefficients[i] != parse_fraction(forms[r - 1][i])) {
        ++mismatches;
        detail += fmt::format("layer {} t^{}; ", r, i);
      }
    }
    if (exact.degree() != 2 * (r - 1)) ++mismatches;
  }
  return make_check("closed forms, layers 1-4 (exact)", mismatches, 0, detail);
}

VerifyCheck check_derivative() {
  double worst = 0.0;
  const double step = 1e-4;
  for (LayerIndex r = 1; r <= 6; ++r) {
    for (double t : {0.5, 1.0, 2.0}) {
      const double fd = (density_time(r, t + step) - density_time(r, t - step)) / (2 * step);
      worst = std::max(worst, std::fabs(fd - height_pmf(r - 1, t)));
    }
  }
  return make_check("d/dt density == Pr(H = r-1), r <= 6", worst, 1e-6);
}

VerifyCheck check_normalization() {
  double worst = 0.0;
  for (double t : {0.1, 1.0, 5.0, 10.0}) {
    const auto dist = height_distribution(t);
    worst = std::max(worst, std::fabs(1.0 - dist.mass() - dist.tail_bound));
  }
  return make_check("height law normalization", worst, 1e-12);
}

VerifyCheck check_exact_identities(VerifyLevel level, const VerifyHooks& hooks) {
  const LayerIndex symbolic_max = level == VerifyLevel::full ? 100 : 20;
  const LayerIndex trend_max = level == VerifyLevel::full ? 200 : 50;
  int violations = 0;
  for (LayerIndex r = 1; r <= symbolic_max; ++r) {
    if (density_symbolic(r).constant != hooks.end_density(r)) ++violations;
  }
  const Rational half(1, 2);
  Rational prev = 0;
  for (LayerIndex r = 1; r <= trend_max; ++r) {
    const Rational value = hooks.end_density(r);
    if (value <= prev || value >= half) ++violations;
    if (end_density_split(r).total() != value) ++violations;
    prev = value;
  }
  return make_check(fmt::format("exact identities (symbolic r<={}, trend r<={})", symbolic_max,
                                trend_max),
                    violations, 0);
}

VerifyCheck check_height_law(VerifyLevel level) {
  const std::uint32_t m_max = level == VerifyLevel::full ? 10 : 8;
  int mismatches = 0;
  for (std::uint32_t m = 0; m <= m_max; ++m) {
    const auto a = exact_height_dist(m);
    const auto b = multinomial_height_dist(m);
    if (a.probabilities != b.probabilities) ++mismatches;
  }
  return make_check(fmt::format("height law: enumeration == multinomial, m <= {}", m_max),
                    mismatches, 0);
}

std::vector<VerifyCheck> check_oracle_vs_analytic(VerifyLevel level) {
  std::vector<VerifyCheck> out;
  const std::uint32_t m_max = level == VerifyLevel::full ? 12 : 8;
  double worst_excess = -1.0;
  double worst = 0.0;
  for (double t : {0.25, 0.5, 1.0}) {
    for (LayerIndex r = 1; r <= 3; ++r) {
      const auto p = exact_density_poissonized(3, t, r, 1, m_max, OracleMethod::enumeration);
      const double dev = std::fabs(p.value - density_time(r, t));
      worst = std::max(worst, dev);
      worst_excess = std::max(worst_excess, dev - p.tail_bound);
    }
  }
  out.push_back(make_check(
      fmt::format("oracle (enumeration, m <= {}) vs closed form, excess over tail bound",
                  m_max),
      std::max(worst_excess, 0.0), 1e-12, fmt::format("max deviation {:.3e}", worst)));

  if (level == VerifyLevel::full) {
    double dp_worst = 0.0;
    for (double t : {0.25, 0.5, 1.0}) {
      for (LayerIndex r = 1; r <= 3; ++r) {
        const auto p = exact_density_poissonized_within(3, t, r, 1, 1e-15);
        dp_worst = std::max(dp_worst, std::fabs(p.value - density_time(r, t)));
      }
    }
    out.push_back(make_check("oracle (windowed DP, tail < 1e-15) vs closed form", dp_worst, 1e-9));
  }
  return out;
}

std::vector<VerifyCheck> check_simulation(VerifyLevel level, unsigned threads) {
  std::vector<VerifyCheck> out;
  const std::uint64_t reps = level == VerifyLevel::full ? 1'000'000 : 100'000;
  std::uint64_t height_checks = 0;
  std::uint64_t height_failures = 0;

  {  // end-densities
    RunConfig cfg;
    cfg.mode = FixedArrivals{600};
    cfg.replications = reps;
    cfg.max_layer = 10;
    cfg.seed = 20240601;
    cfg.threads = threads;
    const auto result = run(cfg);
    height_checks += result.height_checks;
    height_failures += result.height_violations;
    double worst = 0.0;
    for (LayerIndex r = 1; r <= 10; ++r) {
      const auto& e = result.at(1, r);
      const double target = end_density(r).get_d();
      worst = std::max(worst, std::fabs(e.mean - target) / e.standard_error);
    }
    out.push_back(make_check(
        fmt::format("simulated end-densities (M=600, {} reps) in standard errors", reps), worst,
        4.0));
  }
  {  // time-dependent densities
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      RunConfig cfg;
      cfg.mode = FixedTime{t};
      cfg.replications = 100'000;
      cfg.max_layer = 6;
      cfg.seed = 7 + static_cast<std::uint64_t>(t * 10);
      cfg.threads = threads;
      const auto result = run(cfg);
      height_checks += result.height_checks;
      height_failures += result.height_violations;
      for (LayerIndex r = 1; r <= 6; ++r) {
        const double p = density_time(r, t);
        const double se = std::sqrt(p * (1 - p) / static_cast<double>(cfg.replications));
        if (se > 0) worst = std::max(worst, std::fabs(result.at(1, r).mean - p) / se);
      }
    }
    out.push_back(make_check("simulated rho_t(r), r <= 6, t in {0.5,1,2}, in standard errors",
                             worst, 4.0));
  }
  {  // oracle cells
    const std::uint32_t m = 8;
    const auto exact = exact_after_m_arrivals(3, m);
    RunConfig cfg;
    cfg.mode = FixedArrivals{m};
    cfg.replications = reps;
    cfg.max_layer = m;
    cfg.observe_sites = {0, 1, 2};
    cfg.seed = 99;
    cfg.threads = threads;
    const auto result = run(cfg);
    double worst = 0.0;
    for (const auto& e : result.estimates) {
      const double p = exact.at(e.site, e.layer).get_d();
      const double se = std::sqrt(p * (1 - p) / static_cast<double>(reps));
      worst = std::max(worst, se > 0 ? std::fabs(e.mean - p) / se : (e.mean == p ? 0.0 : 1e9));
    }
    out.push_back(make_check("simulator vs exact occupancy after 8 arrivals, in standard errors",
                             worst, 4.0));
  }
  out.push_back(make_check(fmt::format("pathwise height identity ({} replications)", height_checks),
                           static_cast<double>(height_failures), 0));
  {
    RunConfig cfg;
    cfg.mode = FixedArrivals{30'000};
    cfg.replications = 100;
    cfg.seed = 3;
    cfg.threads = threads;
    const auto stats = raise_fraction(cfg);
    out.push_back(make_check("raising fraction vs 2/3", std::fabs(stats.raise_fraction() - 2.0 / 3.0),
                             0.005));
  }
  {
    RunConfig cfg;
    cfg.mode = FixedArrivals{200};
    cfg.replications = 5000;
    cfg.max_layer = 8;
    cfg.seed = 11;
    std::ostringstream a;
    std::ostringstream b;
    cfg.threads = 1;
    write_density_csv(a, run(cfg));
    cfg.threads = 4;
    write_density_csv(b, run(cfg));
    out.push_back(make_check("thread-count independence (byte-identical CSV)",
                             a.str() == b.str() ? 0.0 : 1.0, 0));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& reference_end_densities() {
  static const std::vector<std::string> table = {
      "1/3",           "11/27",           "35/81",           "971/2187",
      "8881/19683",    "80811/177147",    "733209/1594323",  "6640491/14348907",
      "60067809/129140163", "542880971/1162261467",
  };
  return table;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

void VerifyReport::print(std::ostream& out) const {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << format_decimal(c.measured, 4)
        << " tolerance=" << format_decimal(c.tolerance, 4);
    if (!c.detail.empty()) out << "  [" << c.detail << "]";
    out << '\n';
  }
  const auto failed = std::count_if(checks.begin(), checks.end(),
                                    [](const VerifyCheck& c) { return !c.passed; });
  out << (failed == 0 ? "all checks passed" : fmt::format("{} check(s) failed", failed)) << '\n';
}

VerifyReport run_verification(VerifyLevel level, unsigned threads, const VerifyHooks& hooks) {
  VerifyReport report;
  report.checks.push_back(check_table(hooks));
  report.checks.push_back(check_golden_forms());
  report.checks.push_back(check_derivative());
  report.checks.push_back(check_normalization());
  report.checks.push_back(check_exact_identities(level, hooks));
  report.checks.push_back(check_height_law(level));
  for (auto& c : check_oracle_vs_analytic(level)) report.checks.push_back(std::move(c));
  for (auto& c : check_simulation(level, threads)) report.checks.push_back(std::move(c));
  return report;
}

}  // namespace mlpark
