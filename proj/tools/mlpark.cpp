// mlpark: command-line front end.
//
// Exit codes: 0 success, 1 invariant or verification failure, 2 usage error.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mlpark/analytic.hpp"
#include "mlpark/errors.hpp"
#include "mlpark/io.hpp"
#include "mlpark/oracle.hpp"
#include "mlpark/simulator.hpp"
#include "mlpark/verify.hpp"
#include "mlpark/version.hpp"

namespace {

using namespace mlpark;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr const char* kSeedEnv = "MLPARK_SEED";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config keys map onto flags one to one, except for underscores.
std::string flag_message(const std::string& message) {
  static const char* keys[] = {"sites", "mode",   "time",        "arrivals", "reps",
                               "layers", "observe", "seed", "raise_stats", "threads"};
  for (const char* key : keys) {
    const std::string prefix = std::string(key) + ":";
    if (message.rfind(prefix, 0) == 0) {
      std::string flag = key;
      for (auto& c : flag) c = c == '_' ? '-' : c;
      return "--" + flag + message.substr(prefix.size() - 1);
    }
  }
  return message;
}

struct OutputSpec {
  std::string out;
  std::string manifest;
  std::string plot_script;
};

void add_output_flags(CLI::App* cmd, OutputSpec& dest) {
  cmd->add_option("--out", dest.out, "CSV destination (default: stdout)");
  cmd->add_option("--manifest", dest.manifest,
                  "Manifest destination (default: <out>.manifest when --out is given)");
  cmd->add_option("--plot-script", dest.plot_script, "Also write a gnuplot script here");
}

std::string command_line(int argc, char** argv) {
  std::string line = "mlpark";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.find_first_of(" \t'\"") != std::string::npos) arg = "'" + arg + "'";
    line += " " + arg;
  }
  return line;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw UsageError("failed writing '" + path + "'");
}

// Writes the CSV (stdout when no path), the manifest and the plot script.
void emit(const OutputSpec& dest, const std::string& csv, const std::string& command,
          const std::optional<RunConfig>& config, std::string_view plot_title,
          std::string_view plot_kind) {
  if (dest.out.empty()) {
    std::cout << csv;
    std::cout.flush();
  } else {
    write_file(dest.out, csv);
  }
  const std::string manifest_path =
      dest.manifest.empty() ? (dest.out.empty() ? "" : dest.out + ".manifest") : dest.manifest;
  if (!manifest_path.empty()) {
    Manifest m;
    m.command = command;
    m.timestamp = utc_timestamp();
    m.config = config;
    m.outputs.push_back({dest.out.empty() ? "-" : dest.out, sha256_hex(csv)});
    write_file(manifest_path, to_manifest_text(m));
  }
  if (!dest.plot_script.empty()) {
    write_file(dest.plot_script,
               gnuplot_script(dest.out.empty() ? "data.csv" : dest.out, plot_title, plot_kind));
  }
}

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(env, &used, 10);
    if (used == std::string(env).size() && env[0] != '-') return seed;
  } catch (const std::exception&) {
  }
  throw UsageError(fmt::format("{}: expected a non-negative integer, got '{}'", kSeedEnv, env));
}

// ------------------------------------------------------------------ analytic

struct TableArgs {
  LayerIndex layers = 10;
  OutputSpec output;
};

int cmd_analytic_table(const TableArgs& args, const std::string& command) {
  const auto diagnostics = limit_diagnostics(args.layers);
  std::ostringstream csv;
  write_end_density_csv(csv, diagnostics);
  emit(args.output, csv.str(), command, std::nullopt, "End-densities", "table");
  if (!diagnostics.ok()) {
    std::cerr << "mlpark: end-density trend invariants violated\n";
    return kExitFailure;
  }
  return 0;
}

struct CurveArgs {
  std::vector<LayerIndex> layers = {1, 2, 3, 4};
  double t_start = 0.0;
  double t_end = 5.0;
  double t_step = 0.05;
  OutputSpec output;
};

int cmd_analytic_curve(const CurveArgs& args, const std::string& command) {
  std::vector<double> grid;
  try {
    grid = time_grid(args.t_start, args.t_end, args.t_step);
  } catch (const InputError& e) {
    throw UsageError(fmt::format("--t-start/--t-end/--t-step: {}", e.what()));
  }
  std::ostringstream csv;
  write_curve_csv(csv, args.layers, grid);
  emit(args.output, csv.str(), command, std::nullopt, "Center densities", "curve");
  return 0;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  std::string config_path;
  std::optional<SiteIndex> sites;
  std::optional<double> time;
  std::optional<std::uint64_t> arrivals;
  std::optional<std::uint64_t> reps;
  std::optional<LayerIndex> layers;
  std::vector<SiteIndex> observe;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool raise_stats = false;
  OutputSpec output;
};

RunConfig resolve_config(const SimulateArgs& args) {
  RunConfig c;
  bool mode_from_file = false;
  if (!args.config_path.empty()) {
    c = load_config_file(args.config_path);
    mode_from_file = true;
  } else {
    c.seed = default_seed();
  }
  if (args.sites) c.n_sites = *args.sites;
  if (args.reps) c.replications = *args.reps;
  if (args.layers) c.max_layer = *args.layers;
  if (!args.observe.empty()) c.observe_sites = args.observe;
  if (args.seed) c.seed = *args.seed;
  if (args.threads) c.threads = *args.threads;
  if (args.raise_stats) c.track_raises = true;
  if (args.time) {
    c.mode = FixedTime{*args.time};
  } else if (args.arrivals) {
    c.mode = FixedArrivals{*args.arrivals};
  } else if (!mode_from_file) {
    c.mode = FixedArrivals{recommended_arrivals(c.n_sites, c.max_layer)};
  }
  if (c.track_raises) {
    if (c.n_sites != 3) throw UsageError("--raise-stats requires --sites 3");
    if (!std::holds_alternative<FixedArrivals>(c.mode)) {
      throw UsageError("--raise-stats requires --arrivals");
    }
  }
  c.validate();
  return c;
}

int cmd_simulate(const SimulateArgs& args, const std::string& command) {
  const RunConfig config = resolve_config(args);
  const RunResult result = run(config);
  for (const auto& w : result.warnings) std::cerr << "mlpark: warning: " << w << '\n';
  if (result.raises) {
    const auto& r = *result.raises;
    std::cerr << fmt::format("raised={} total={} raise_fraction={} mean_abs_side_difference={}\n",
                             r.raised, r.total, format_decimal(r.raise_fraction()),
                             format_decimal(r.mean_abs_side_difference()));
  }
  std::ostringstream csv;
  write_density_csv(csv, result);
  emit(args.output, csv.str(), command, config, "Simulated occupancy", "simulate");
  if (result.height_violations != 0) {
    std::cerr << fmt::format("mlpark: height identity violated in {} of {} replications\n",
                             result.height_violations, result.height_checks);
    return kExitFailure;
  }
  return 0;
}

// -------------------------------------------------------------------- oracle

struct OracleArgs {
  SiteIndex sites = 3;
  std::uint32_t arrivals = 4;
  std::string method = "auto";
  LayerIndex window = 4;
  double time = 1.0;
  LayerIndex layer = 1;
  std::optional<SiteIndex> site;
  std::optional<std::uint32_t> max_arrivals;
  double tail = 1e-15;
  OutputSpec output;
};

OracleMethod parse_method(const std::string& name) {
  if (name == "auto") return OracleMethod::automatic;
  if (name == "enumeration") return OracleMethod::enumeration;
  return OracleMethod::dynamic_programming;
}

int cmd_oracle_exact(const OracleArgs& args, const std::string& command) {
  const auto method = parse_method(args.method);
  ExactOccupancy occ;
  if (method == OracleMethod::dynamic_programming) {
    occ = exact_after_m_arrivals_dp(args.sites, args.arrivals, args.window);
  } else {
    occ = exact_after_m_arrivals(args.sites, args.arrivals);
  }
  std::ostringstream csv;
  write_occupancy_csv(csv, occ);
  emit(args.output, csv.str(), command, std::nullopt, "Exact occupancy", "simulate");
  return 0;
}

int cmd_oracle_poissonized(const OracleArgs& args, const std::string& command) {
  const SiteIndex site = args.site.value_or(center_sites(args.sites).front());
  const auto density =
      args.max_arrivals
          ? exact_density_poissonized(args.sites, args.time, args.layer, site, *args.max_arrivals,
                                      parse_method(args.method))
          : exact_density_poissonized_within(args.sites, args.time, args.layer, site, args.tail);
  std::string csv = "sites,site,layer,t,value,tail_bound,max_arrivals\n";
  csv += fmt::format("{},{},{},{},{},{},{}\n", args.sites, site, args.layer,
                     format_decimal(args.time, 17), format_decimal(density.value, 17),
                     format_decimal(density.tail_bound, 3), density.max_arrivals);
  emit(args.output, csv, command, std::nullopt, "Poissonized density", "table");
  return 0;
}

int cmd_oracle_height(const OracleArgs& args, const std::string& command) {
  std::ostringstream csv;
  write_height_csv(csv, exact_height_dist(args.arrivals));
  emit(args.output, csv.str(), command, std::nullopt, "Height law", "table");
  return 0;
}

// -------------------------------------------------------------------- verify

int cmd_verify(const std::string& level, unsigned threads) {
  const auto report =
      run_verification(level == "full" ? VerifyLevel::full : VerifyLevel::quick, threads);
  report.print(std::cout);
  return report.passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilayer parking: exact densities, simulation and oracles", "mlpark"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  const std::string command = command_line(argc, argv);
  int status = 0;

  // analytic
  auto* analytic = app.add_subcommand("analytic", "Closed-form densities of the three-site system");
  analytic->require_subcommand(1);

  TableArgs table_args;
  auto* table = analytic->add_subcommand("table", "Exact end-densities for layers 1..N");
  table->add_option("--layers", table_args.layers, "Largest layer")
      ->check(CLI::Range(1u, 100000u));
  add_output_flags(table, table_args.output);
  table->callback([&] { status = cmd_analytic_table(table_args, command); });

  CurveArgs curve_args;
  auto* curve = analytic->add_subcommand("curve", "Center density against time");
  curve->add_option("--layers", curve_args.layers, "Layers to tabulate")
      ->delimiter(',')
      ->check(CLI::Range(1u, 100000u));
  curve->add_option("--t-start", curve_args.t_start, "First time")->check(CLI::NonNegativeNumber);
  curve->add_option("--t-end", curve_args.t_end, "Last time")->check(CLI::NonNegativeNumber);
  curve->add_option("--t-step", curve_args.t_step, "Grid step")->check(CLI::PositiveNumber);
  add_output_flags(curve, curve_args.output);
  curve->callback([&] { status = cmd_analytic_curve(curve_args, command); });

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates of occupancy densities");
  simulate->add_option("--config", sim.config_path, "key=value config or manifest file")
      ->check(CLI::ExistingFile);
  simulate->add_option("--sites", sim.sites, "Number of sites");
  auto* time_opt = simulate->add_option("--time", sim.time, "Fixed observation time t");
  auto* arrivals_opt = simulate->add_option("--arrivals", sim.arrivals, "Fixed arrival count M");
  time_opt->excludes(arrivals_opt);
  simulate->add_option("--reps", sim.reps, "Replications");
  simulate->add_option("--layers", sim.layers, "Observe layers 1..R");
  simulate->add_option("--observe", sim.observe, "Sites to observe (default: center)")
      ->delimiter(',');
  simulate->add_option("--seed", sim.seed, fmt::format("Base seed (default: ${} or 0)", kSeedEnv));
  simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)");
  simulate->add_flag("--raise-stats", sim.raise_stats,
                     "Report the fraction of arrivals raising the center height");
  add_output_flags(simulate, sim.output);
  simulate->callback([&] { status = cmd_simulate(sim, command); });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact small-system ground truth");
  oracle->require_subcommand(1);
  OracleArgs oa;
  const auto method_check = CLI::IsMember({"auto", "enumeration", "dp"});

  auto* exact = oracle->add_subcommand("exact", "Exact occupancy after M uniform arrivals");
  exact->add_option("--sites", oa.sites, "Number of sites")->check(CLI::Range(1u, 64u));
  exact->add_option("--arrivals", oa.arrivals, "Arrival count M");
  exact->add_option("--method", oa.method, "auto, enumeration or dp")->check(method_check);
  exact->add_option("--window", oa.window, "Exact layers for dp")->check(CLI::Range(1u, 64u));
  add_output_flags(exact, oa.output);
  exact->callback([&] { status = cmd_oracle_exact(oa, command); });

  auto* poissonized = oracle->add_subcommand("poissonized", "Exact density at time t");
  poissonized->add_option("--sites", oa.sites, "Number of sites")->check(CLI::Range(1u, 64u));
  poissonized->add_option("--time", oa.time, "Time t")->check(CLI::NonNegativeNumber);
  poissonized->add_option("--layer", oa.layer, "Layer")->check(CLI::PositiveNumber);
  poissonized->add_option("--site", oa.site, "Site (default: center)");
  auto* max_opt =
      poissonized->add_option("--max-arrivals", oa.max_arrivals, "Truncate at this arrival count");
  auto* tail_opt = poissonized->add_option("--tail", oa.tail, "Truncate once the tail is below")
                       ->check(CLI::PositiveNumber);
  max_opt->excludes(tail_opt);
  poissonized->add_option("--method", oa.method, "auto, enumeration or dp")->check(method_check);
  add_output_flags(poissonized, oa.output);
  poissonized->callback([&] { status = cmd_oracle_poissonized(oa, command); });

  auto* height = oracle->add_subcommand("height-dist", "Law of the center height after M arrivals");
  height->add_option("--arrivals", oa.arrivals, "Arrival count M");
  add_output_flags(height, oa.output);
  height->callback([&] { status = cmd_oracle_height(oa, command); });

  // verify
  std::string level = "quick";
  unsigned verify_threads = 0;
  auto* verify = app.add_subcommand("verify", "Cross-module consistency checks");
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--threads", verify_threads, "Worker threads (0: all cores)");
  verify->callback([&] { status = cmd_verify(level, verify_threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "mlpark: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "mlpark: " << flag_message(e.what()) << '\n';
    return kExitUsage;
  } catch (const SizeError& e) {
    std::cerr << "mlpark: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedConfiguration& e) {
    std::cerr << "mlpark: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "mlpark: internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return status;
}
