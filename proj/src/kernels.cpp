#include "hardcore/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hardcore {

WeightKernel parse_kernel(std::string_view name) {
  if (name == "isolated") return WeightKernel::isolated;
  if (name == "random") return WeightKernel::random;
  if (name == "large") return WeightKernel::large;
  if (name == "small") return WeightKernel::small;
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected isolated, random, large or small)");
}

std::string to_string(WeightKernel kernel) {
  switch (kernel) {
    case WeightKernel::isolated: return "isolated";
    case WeightKernel::random: return "random";
    case WeightKernel::large: return "large";
    case WeightKernel::small: return "small";
  }
  return "?";
}

double weight_survival(WeightKernel kernel, double r, double w) {
  switch (kernel) {
    case WeightKernel::isolated: return w <= 1.0 ? 1.0 : 0.0;
    case WeightKernel::random: return std::clamp(1.0 - w, 0.0, 1.0);
    case WeightKernel::large: return w <= r ? 1.0 : 0.0;
    case WeightKernel::small: return r == 0.0 || w <= 1.0 / r ? 1.0 : 0.0;
  }
  return 0.0;
}

double weight_from_mark(WeightKernel kernel, double r, double mark) {
  switch (kernel) {
    case WeightKernel::isolated: return 1.0;
    case WeightKernel::random: return mark;
    case WeightKernel::large: return r;
    case WeightKernel::small:
      if (!(r > 0.0)) throw std::domain_error("small-retained weight 1/r needs r > 0");
      return 1.0 / r;
  }
  return 0.0;
}

double sample_weight(WeightKernel kernel, double r, CounterRng& rng) {
  return weight_from_mark(kernel, r, kernel == WeightKernel::random ? rng.uniform_open() : 0.5);
}

bool are_neighbors(const Grain& a, const Grain& b, int d) {
  double dist2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double delta = a.center[i] - b.center[i];
    dist2 += delta * delta;
  }
  const double reach = a.radius + b.radius;
  return dist2 <= reach * reach;
}

bool obstructs(const Grain& a, const Grain& b, int d) {
  return a.weight >= b.weight && are_neighbors(a, b, d);
}

}  // namespace hardcore
