#include "mlpark/io.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "mlpark/errors.hpp"
#include "mlpark/version.hpp"

namespace mlpark {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw InputError(fmt::format("{}: expected a non-negative integer, got '{}'", key, value));
  }
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  // istringstream with the classic locale keeps '.' as separator.
  std::istringstream in(value);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail() || !in.eof()) {
    throw InputError(fmt::format("{}: expected a number, got '{}'", key, value));
  }
  return v;
}

std::string fraction_columns(const Rational& value) {
  return fmt::format("{},{},{}", value.get_num().get_str(), value.get_den().get_str(),
                     format_decimal(value.get_d()));
}

}  // namespace

std::string format_decimal(double value, int significant_digits) {
  if (value == 0.0) return "0";
  return fmt::format("{:.{}g}", value, significant_digits);
}

void write_end_density_csv(std::ostream& out, const LimitDiagnostics& diagnostics) {
  out << "r,exact_fraction,decimal,gap_to_half,term1,term2\n";
  for (const auto& row : diagnostics.rows) {
    out << row.layer << ',' << to_fraction_string(row.end_density) << ','
        << format_decimal(row.decimal) << ',' << format_decimal(row.gap_to_half) << ','
        << format_decimal(row.collision.get_d()) << ','
        << format_decimal(row.remainder.get_d()) << '\n';
  }
}

void write_curve_csv(std::ostream& out, std::span<const LayerIndex> layers,
                     std::span<const double> times) {
  out << 't';
  for (LayerIndex r : layers) out << ",layer_" << r;
  out << '\n';
  for (double t : times) {
    out << format_decimal(t);
    for (LayerIndex r : layers) out << ',' << format_decimal(density_time(r, t));
    out << '\n';
  }
}

void write_density_csv(std::ostream& out, const RunResult& result) {
  const auto& cfg = result.config;
  std::string mode;
  std::string t_or_m;
  if (const auto* ft = std::get_if<FixedTime>(&cfg.mode)) {
    mode = "time";
    t_or_m = format_decimal(ft->t, 17);
  } else {
    mode = "arrivals";
    t_or_m = std::to_string(std::get<FixedArrivals>(cfg.mode).arrivals);
  }
  out << "site,layer,mean,stderr,replications,mode,t_or_M,seed\n";
  for (const auto& e : result.estimates) {
    out << e.site << ',' << e.layer << ',' << format_decimal(e.mean) << ','
        << format_decimal(e.standard_error) << ',' << e.replications << ',' << mode << ','
        << t_or_m << ',' << cfg.seed << '\n';
  }
}

void write_occupancy_csv(std::ostream& out, const ExactOccupancy& occupancy) {
  out << "site,layer,numerator,denominator,decimal\n";
  for (const auto& [key, numerator] : occupancy.numerators) {
    out << key.first << ',' << key.second << ','
        << fraction_columns(occupancy.at(key.first, key.second)) << '\n';
  }
}

void write_height_csv(std::ostream& out, const DiscreteDist<Rational>& dist) {
  out << "height,numerator,denominator,decimal\n";
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    out << dist.offset + static_cast<std::int64_t>(i) << ','
        << fraction_columns(dist.probabilities[i]) << '\n';
  }
}

std::vector<double> time_grid(double first, double last, double step) {
  if (!(first >= 0.0) || !std::isfinite(first) || !std::isfinite(last)) {
    throw InputError("time grid: times must be finite and non-negative");
  }
  if (!(step > 0.0)) throw InputError("time grid: step must be positive");
  if (last < first) throw InputError("time grid: end precedes start");
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor((last - first) / step + 1e-6));
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(first + static_cast<double>(i) * step);
  return grid;
}

std::string to_config_text(const RunConfig& config) {
  std::string text;
  text += fmt::format("sites={}\n", config.n_sites);
  if (const auto* ft = std::get_if<FixedTime>(&config.mode)) {
    text += fmt::format("mode=time\ntime={}\n", format_decimal(ft->t, 17));
  } else {
    text += fmt::format("mode=arrivals\narrivals={}\n",
                        std::get<FixedArrivals>(config.mode).arrivals);
  }
  text += fmt::format("reps={}\nlayers={}\n", config.replications, config.max_layer);
  if (!config.observe_sites.empty()) {
    text += fmt::format("observe={}\n", fmt::join(config.observe_sites, ","));
  }
  text += fmt::format("seed={}\nraise_stats={}\nthreads={}\n", config.seed,
                      config.track_raises ? 1 : 0, config.threads);
  return text;
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig config;
  std::string mode;
  std::optional<double> time;
  std::optional<std::uint64_t> arrivals;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw InputError(fmt::format("line {}: expected key=value", line_no));
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key == "sites") {
      config.n_sites = static_cast<SiteIndex>(parse_unsigned(key, value));
    } else if (key == "mode") {
      if (value != "time" && value != "arrivals") {
        throw InputError(fmt::format("mode: expected 'time' or 'arrivals', got '{}'", value));
      }
      mode = value;
    } else if (key == "time") {
      time = parse_real(key, value);
    } else if (key == "arrivals") {
      arrivals = parse_unsigned(key, value);
    } else if (key == "reps") {
      config.replications = parse_unsigned(key, value);
    } else if (key == "layers") {
      config.max_layer = static_cast<LayerIndex>(parse_unsigned(key, value));
    } else if (key == "observe") {
      config.observe_sites.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        config.observe_sites.push_back(static_cast<SiteIndex>(parse_unsigned(key, trim(item))));
      }
    } else if (key == "seed") {
      config.seed = parse_unsigned(key, value);
    } else if (key == "raise_stats") {
      config.track_raises = parse_unsigned(key, value) != 0;
    } else if (key == "threads") {
      config.threads = static_cast<unsigned>(parse_unsigned(key, value));
    } else if (key == "command" || key == "version" || key == "timestamp" ||
               key == "output" || key == "sha256") {
      continue;
    } else {
      throw InputError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }

  if (mode.empty()) mode = time && !arrivals ? "time" : "arrivals";
  if (mode == "time") {
    if (arrivals) throw InputError("arrivals: not allowed with mode=time");
    config.mode = FixedTime{time.value_or(1.0)};
  } else {
    if (time) throw InputError("time: not allowed with mode=arrivals");
    config.mode = FixedArrivals{
        arrivals.value_or(recommended_arrivals(config.n_sites, config.max_layer))};
  }
  config.validate();
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string to_manifest_text(const Manifest& manifest) {
  std::string text = "# mlpark run manifest; valid as a --config file\n";
  text += fmt::format("command={}\nversion={}\ntimestamp={}\n", manifest.command,
                      manifest.version.empty() ? kVersion : manifest.version, manifest.timestamp);
  if (manifest.config) text += to_config_text(*manifest.config);
  for (const auto& [path, digest] : manifest.outputs) {
    text += fmt::format("output={}\nsha256={}\n", path, digest);
  }
  return text;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

std::string gnuplot_script(std::string_view csv_path, std::string_view title,
                           std::string_view kind) {
  std::string script;
  script += "# gnuplot script generated by mlpark\n";
  script += "set datafile separator ','\nset key autotitle columnhead\n";
  script += fmt::format("set title '{}'\n", title);
  if (kind == "curve") {
    script += "set xlabel 't'\nset ylabel 'density'\n";
    script += fmt::format(
        "stats '{0}' skip 1 nooutput\nplot for [c=2:STATS_columns] '{0}' using 1:c with lines\n",
        csv_path);
  } else if (kind == "table") {
    script += "set xlabel 'layer'\nset ylabel 'end-density'\n";
    script += fmt::format("plot '{}' using 1:3 with linespoints, 0.5 with lines dt 2\n", csv_path);
  } else {
    script += "set xlabel 'layer'\nset ylabel 'mean occupancy'\n";
    script += fmt::format(
        "plot '{}' using 2:3:4 with yerrorbars title 'simulated', 0.5 with lines dt 2\n",
        csv_path);
  }
  return script;
}

}  // namespace mlpark
