#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hardcore/simulator.hpp"

namespace hardcore {

/// Grains of one replication together with its window.
struct GrainSet {
  std::span<const Grain> grains;
  Window window;
};

GrainSet view(const BooleanSample& s);
GrainSet view(const ThinnedSample& s);

/// Mean over replications with the standard error of the mean (NaN for n < 2).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};
Estimate summarize(std::span<const double> per_replication);

struct CovarianceEstimate {
  std::vector<double> lags;
  std::vector<double> values;
  std::vector<double> std_error;
  std::size_t replications = 0;
};

struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;
};

/// Fraction of the core covered by the grains, from a stratified grid with
/// one jittered probe per stratum (about `probes` strata).
double covered_fraction(const GrainSet& sample, std::size_t probes, CounterRng rng);
Estimate estimate_volume_fraction(std::span<const GrainSet> samples, std::size_t probes = 1 << 14,
                                  std::uint64_t seed = 1);

/// Germs (centers) inside the core per unit volume.
Estimate estimate_intensity(std::span<const GrainSet> samples);

/// Unit directions averaged over by the covariance estimator.
std::vector<std::array<double, 3>> probe_directions(int d);

/// k(z) per replication from quasi-random probes x in the core shrunk by the
/// largest lag, averaging 1(x) 1(x + z e) - p^2 over the probe directions.
std::vector<double> cover_covariance_once(const GrainSet& sample, std::span<const double> lags,
                                          std::size_t probes, CounterRng rng);
CovarianceEstimate estimate_cover_covariance(std::span<const GrainSet> samples, std::span<const double> lags,
                                             std::size_t probes = 1 << 12, std::uint64_t seed = 1);

/// Per-lag mean and standard error over rows of per-replication values.
CovarianceEstimate aggregate_replications(std::span<const double> lags,
                                          const std::vector<std::vector<double>>& rows);

/// Translation-corrected estimate of g(r) - 1 for the germs in the core,
/// using annuli |d - r| <= bandwidth.
std::vector<double> pair_correlation_once(const GrainSet& sample, std::span<const double> lags,
                                          double bandwidth);
CovarianceEstimate estimate_pair_correlation(std::span<const GrainSet> samples, std::span<const double> lags,
                                             double bandwidth);

/// Counts of core germs with radius > grid[i]; the last entry is the total core count.
std::vector<double> radius_exceedances(const GrainSet& sample, std::span<const double> grid);
/// Pooled ratio estimate from per-replication radius_exceedances rows.
CovarianceEstimate radius_tail_from_counts(std::span<const double> grid,
                                           const std::vector<std::vector<double>>& rows);

/// Fraction of core germs with radius > r, pooled over replications; the
/// standard error is that of a ratio estimator.
CovarianceEstimate empirical_radius_tail(std::span<const GrainSet> samples, std::span<const double> grid);

/// OLS of log(value) on log(lag) over points with lag in [lo, hi].
TailFit fit_tail_exponent(std::span<const double> lags, std::span<const double> values, double lo,
                          double hi);

/// `lag,value,stderr,n`.
void write_estimate_csv(std::ostream& os, const CovarianceEstimate& est,
                        std::span<const std::string> header_lines = {});

/// {"slope":..,"intercept":..,"r_squared":..,"lo":..,"hi":..}
std::string tail_fit_json(const TailFit& fit);

}  // namespace hardcore
