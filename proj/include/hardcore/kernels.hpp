#pragma once

#include <array>
#include <string>
#include <string_view>

#include "hardcore/rng.hpp"

namespace hardcore {

/// The four weight mechanisms deciding which overlapping grain survives.
enum class WeightKernel {
  isolated,  ///< every weight is 1: only grains without neighbors survive
  random,    ///< independent uniform(0,1) weights
  large,     ///< weight = radius
  small,     ///< weight = 1 / radius
};

inline constexpr std::array<WeightKernel, 4> kAllKernels{
    WeightKernel::isolated, WeightKernel::random, WeightKernel::large, WeightKernel::small};

/// Accepts "isolated", "random", "large" or "small"; throws std::invalid_argument.
WeightKernel parse_kernel(std::string_view name);
std::string to_string(WeightKernel kernel);

/// G_r[w, inf): probability that a grain of radius r carries weight >= w.
double weight_survival(WeightKernel kernel, double r, double w);

/// Weight for a grain of radius r. `mark` is a uniform(0,1) draw and is used
/// only by the random kernel, so one marked sample can be thinned under
/// every kernel.
double weight_from_mark(WeightKernel kernel, double r, double mark);

double sample_weight(WeightKernel kernel, double r, CounterRng& rng);

struct Grain {
  std::array<double, 3> center{};
  double radius = 0.0;
  double weight = 0.0;
};

/// Closed balls intersect (touching counts).
bool are_neighbors(const Grain& a, const Grain& b, int d);

/// a obstructs b: they are neighbors and a is at least as heavy.
bool obstructs(const Grain& a, const Grain& b, int d);

}  // namespace hardcore
