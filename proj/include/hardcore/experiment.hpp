#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hardcore/asymptotics.hpp"
#include "hardcore/config.hpp"
#include "hardcore/estimators.hpp"

namespace hardcore {

/// Calls fn(i) for every i in [0, n) on up to `jobs` threads. Indices are
/// claimed from a shared counter; the first exception is rethrown after all
/// workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Models in output order: "original" followed by the configured kernels.
std::vector<std::string> model_names(const ExperimentConfig& config);

/// Monte Carlo estimates for one model ("original" or a kernel) pooled over replications.
struct ModelEstimates {
  std::string model;
  Estimate count;  ///< germs in the core per replication
  Estimate intensity;
  Estimate volume_fraction;
  CovarianceEstimate cover_covariance;
  CovarianceEstimate two_point;
  CovarianceEstimate radius_tail;
};

struct SimulationResult {
  Window window;
  bool margin_capped = false;
  double bias_bound = 0.0;
  double expected_count = 0.0;
  std::vector<ModelEstimates> models;
};

/// Simulates config.replications samples, thins each under every configured
/// kernel and pools the estimates. `on_replication(rep, original, thinned)`
/// runs on the calling thread in replication order.
using ReplicationSink =
    std::function<void(std::size_t, const BooleanSample&, const std::vector<ThinnedSample>&)>;
SimulationResult simulate_and_estimate(const ExperimentConfig& config, int jobs,
                                       const ReplicationSink& on_replication = {});

/// One analytic curve. `error` is set instead of values when the statistic
/// is not available for the model (for example k_th with d >= 3).
struct Curve {
  std::string model;
  std::string statistic;  ///< cover_covariance | two_point | radius_tail | retention
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> asymptote;  ///< NaN where no prediction exists
  std::string asymptote_note;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Curves for every model and statistic. Lags apply to covariance and
/// two-point curves, the radius grid to tails and retention.
std::vector<Curve> analytic_curves(const ExperimentConfig& config, const std::vector<double>& lags,
                                   const std::vector<double>& radius_grid, int jobs);

struct ComparisonRow {
  std::string statistic;
  std::string model;
  double lag = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double asymptotic = 0.0;
  double z = 0.0;  ///< NaN when the standard error is not positive
};

/// (empirical - analytic) / stderr, NaN unless stderr > 0.
double z_score(double empirical, double analytic, double std_error);

/// Rows joining an analytic curve with an estimate on the same grid;
/// std::invalid_argument when the grids differ.
std::vector<ComparisonRow> compare_curves(const Curve& analytic, const CovarianceEstimate& empirical);

struct Verdict {
  std::string rule;  ///< pointwise | slope | bound | amplitude | zero
  std::string model;
  std::string statistic;
  bool pass = false;
  /// Not evaluated (statistic unavailable); ignored by all_pass.
  bool skipped = false;
  std::string detail;
};

/// Pass when every row with a finite z-score has |z| <= threshold.
Verdict pointwise_verdict(std::span<const ComparisonRow> rows, double threshold);

/// Decay-class verdict for an analytic curve: a fitted slope for power
/// laws, pointwise domination by the bound for exponential classes.
Verdict decay_verdict(const Curve& curve, const DecayClass& expected, const AsymptoticLaw& law, double lo,
                      double hi, double slope_tolerance);

/// |curve / asymptote - 1| <= tolerance at the largest grid point in [lo, hi].
Verdict amplitude_verdict(const Curve& curve, double lo, double hi, double tolerance);

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::vector<Verdict> verdicts;
  bool all_pass() const;
};

ComparisonReport build_report(const ExperimentConfig& config, const SimulationResult& simulation,
                              const std::vector<Curve>& pointwise, const std::vector<Curve>& asymptotic);

/// `statistic,model,lag,analytic,empirical,stderr,asymptotic,z`.
void write_report_csv(std::ostream& os, const ComparisonReport& report,
                      std::span<const std::string> header_lines = {});
std::string verdicts_json(const ComparisonReport& report, const std::string& config_hash);

/// Subcommands. Each validates the config before any work and writes under
/// config.output_dir; the returned value is the process exit code
/// (run_compare returns 3 when a verdict fails).
int run_simulate(const ExperimentConfig& config, int jobs, std::ostream& log);
int run_analytic(const ExperimentConfig& config, int jobs, std::ostream& log);
int run_compare(const ExperimentConfig& config, int jobs, std::ostream& log);
/// Fits the `lag,value` columns of a CSV file over [lo, hi].
int run_fit_tail(const std::filesystem::path& input, double lo, double hi, const std::filesystem::path& output,
                 std::ostream& log);

}  // namespace hardcore
