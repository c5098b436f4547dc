#pragma once

// Stable text formats.
//
// All numbers are written with '.' as decimal separator regardless of the
// process locale. Decimal columns carry 10 significant digits.
//
// CSV schemas (header row always present):
//   end densities : r,exact_fraction,decimal,gap_to_half,term1,term2
//   density curve : t,layer_1,...,layer_k
//   simulation    : site,layer,mean,stderr,replications,mode,t_or_M,seed
//   occupancy     : site,layer,numerator,denominator,decimal
//   height law    : height,numerator,denominator,decimal
//
// Run configurations and manifests are plain "key=value" lines; '#' starts a
// comment. A manifest is a valid configuration file.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlpark/analytic.hpp"
#include "mlpark/oracle.hpp"
#include "mlpark/simulator.hpp"

namespace mlpark {

[[nodiscard]] std::string format_decimal(double value, int significant_digits = 10);

void write_end_density_csv(std::ostream& out, const LimitDiagnostics& diagnostics);
void write_curve_csv(std::ostream& out, std::span<const LayerIndex> layers,
                     std::span<const double> times);
void write_density_csv(std::ostream& out, const RunResult& result);
void write_occupancy_csv(std::ostream& out, const ExactOccupancy& occupancy);
void write_height_csv(std::ostream& out, const DiscreteDist<Rational>& dist);

/// Uniform grid first, first+step, ... up to last (inclusive within step/1e6).
[[nodiscard]] std::vector<double> time_grid(double first, double last, double step);

[[nodiscard]] std::string to_config_text(const RunConfig& config);
/// Parses key=value text. Unknown keys raise InputError naming the key;
/// manifest bookkeeping keys are skipped.
[[nodiscard]] RunConfig parse_config_text(std::string_view text);
[[nodiscard]] RunConfig load_config_file(const std::string& path);

struct Manifest {
  std::string command;    // full command line
  std::string version;
  std::string timestamp;  // UTC, ISO 8601
  std::optional<RunConfig> config;  // simulate runs only
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256 hex
};

[[nodiscard]] std::string to_manifest_text(const Manifest& manifest);

[[nodiscard]] std::string sha256_hex(std::string_view data);
[[nodiscard]] std::string utc_timestamp();

/// Generic gnuplot script drawing every data column of `csv_path`.
[[nodiscard]] std::string gnuplot_script(std::string_view csv_path, std::string_view title,
                                         std::string_view kind);

}  // namespace mlpark
