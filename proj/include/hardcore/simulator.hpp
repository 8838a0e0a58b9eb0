#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hardcore/kernels.hpp"
#include "hardcore/radius_law.hpp"

namespace hardcore {

/// Axis-aligned observation box (the core) plus a margin M. Grains are
/// simulated on the core dilated by M in every coordinate.
struct Window {
  int d = 2;
  std::array<double, 3> low{};
  std::array<double, 3> high{};
  double margin = 0.0;

  /// Core [0, side]^d.
  static Window cube(int d, double side, double margin = 0.0);

  void validate() const;
  std::array<double, 3> core_sides() const;
  std::array<double, 3> outer_low() const;
  std::array<double, 3> outer_high() const;
  std::array<double, 3> outer_sides() const;
  double core_volume() const;
  bool in_core(const std::array<double, 3>& x) const;
};

struct BooleanSample {
  std::vector<Grain> grains;
  /// Uniform(0,1) mark per grain; the random kernel uses it as the weight.
  std::vector<double> marks;
  WeightKernel kernel = WeightKernel::random;
  Window window;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  /// Poisson mean of the grain count.
  double expected_count = 0.0;
  double bias_bound = 0.0;

  /// Same grains with weights recomputed for another kernel.
  BooleanSample with_kernel(WeightKernel k) const;
  /// Number of germs inside the core.
  std::size_t core_count() const;
};

struct ThinnedSample {
  std::vector<Grain> retained;
  /// Index of each retained grain in the parent sample.
  std::vector<std::size_t> parent_index;
  std::size_t parent_size = 0;
  WeightKernel kernel = WeightKernel::random;
  Window window;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  double bias_bound = 0.0;

  std::size_t core_count() const;
};

/// Poisson mean of the number of grains hitting the box with these sides:
/// lambda * E|box (+) B_R|.
double expected_hitting_count(double lambda, const RadiusLaw& law, std::span<const double> sides);

/// Expected number of core-hitting grains with radius above M/2. Only those
/// can have a neighbor that misses the core dilated by M, so this bounds
/// the expected number of core-hitting grains whose thinning decision may
/// be wrong.
double margin_bias_bound(double lambda, const RadiusLaw& law, const Window& window, double margin);

struct MarginChoice {
  double margin = 0.0;
  double bias_bound = 0.0;
  /// True when the cap prevented reaching epsilon.
  bool capped = false;
};

/// Smallest margin with bias bound below epsilon, limited to max_margin.
MarginChoice default_margin(double lambda, const RadiusLaw& law, const Window& window,
                            double epsilon, double max_margin);

/// Exact draw of all grains hitting the dilated window. The random stream is
/// derived from (seed, replication) only.
BooleanSample sample_boolean(double lambda, const RadiusLaw& law, WeightKernel kernel,
                             const Window& window, std::uint64_t seed,
                             std::uint64_t replication = 0);

/// Remove every grain obstructed by another grain of the sample.
ThinnedSample thin(const BooleanSample& sample, WeightKernel kernel);
ThinnedSample thin(const BooleanSample& sample);
/// Quadratic reference implementation of thin.
ThinnedSample thin_bruteforce(const BooleanSample& sample, WeightKernel kernel);

/// Smallest |x_i - x_j| - r_i - r_j over pairs (infinity for < 2 grains).
double min_clearance(std::span<const Grain> grains, int d);

/// Grain table `x1..xd,radius,weight,retained`, preceded by '#' comment lines.
/// `retained` may be empty (all rows flagged 1).
void write_grain_csv(std::ostream& os, const BooleanSample& sample, std::span<const char> retained,
                     WeightKernel kernel, std::span<const std::string> header_lines = {});

/// Retention flags of a thinned sample over its parent.
std::vector<char> retained_flags(const ThinnedSample& thinned);

}  // namespace hardcore
