#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hardcore/analytics.hpp"
#include "hardcore/simulator.hpp"

namespace hardcore {

/// Raised for malformed or out-of-range configuration; `field` names the key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  // model.*
  double lambda = 0.05;
  int dimension = 2;
  std::string law = "pareto";  ///< pareto | deterministic | tabulated
  double alpha = 2.5;
  double scale = 1.0;
  double radius = 1.0;
  std::string table;           ///< path of a (radius, cdf) table
  std::string kernel = "all";  ///< a kernel name or "all"

  // window.*
  std::vector<double> core{256.0};  ///< one side for a cube or d sides
  double margin = -1.0;              ///< < 0: choose from epsilon
  double epsilon = 1e-3;
  double max_margin = -1.0;          ///< < 0: longest core side

  // run.*
  int replications = 50;
  std::uint64_t seed = 1;

  // estimate.*
  std::vector<double> lags{4.0, 8.0, 16.0, 32.0};
  std::vector<double> radius_grid{1.0, 2.0, 4.0, 8.0, 16.0};
  int probes = 4096;
  int volume_probes = 16384;
  double bandwidth = 0.5;

  // analytic.*
  std::vector<double> analytic_lags{100.0, 316.22776601683796, 1000.0, 3162.2776601683795, 10000.0};
  std::vector<double> analytic_radius_grid{10.0, 31.622776601683793, 100.0, 316.22776601683796, 1000.0};
  double fit_lo = 100.0;
  double fit_hi = 10000.0;
  double tail_fit_lo = 10.0;
  double tail_fit_hi = 1000.0;

  // tolerance.*
  double single_rel = 1e-9;
  double nested_rel = 1e-6;
  double inner_rel = 1e-6;
  double z_threshold = 3.0;
  double slope_tolerance = 0.15;
  double amplitude_tolerance = 0.1;  ///< |value / asymptote - 1| at the largest fitted lag

  // output.*
  std::string output_dir = "out";
  std::string grain_files = "all";  ///< all | first | none

  bool operator==(const ExperimentConfig&) const = default;

  /// Checks every field against the model and window preconditions.
  void validate() const;

  RadiusLaw make_law() const;
  std::vector<WeightKernel> kernels() const;
  ModelSpec model(WeightKernel kernel) const;
  AnalyticsOptions analytics_options() const;
  /// Window with the configured or default margin.
  Window window() const;
  Window core_window() const;
  /// Replications and core volume divided by 10.
  ExperimentConfig quick() const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed values raise ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// FNV-1a hash of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Grid syntax accepted for list values: "a,b,c", "log:lo:hi:n" or "lin:lo:hi:n".
std::vector<double> parse_grid(std::string_view text);

}  // namespace hardcore
