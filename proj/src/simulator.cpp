#include "hardcore/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

#include "hardcore/geometry.hpp"
#include "hardcore/spatial_index.hpp"

namespace hardcore {

Window Window::cube(int d, double side, double margin) {
  Window w;
  w.d = d;
  for (int i = 0; i < d; ++i) w.high[i] = side;
  w.margin = margin;
  w.validate();
  return w;
}

void Window::validate() const {
  require_dimension(d, kMaxSimulationDimension);
  for (int i = 0; i < d; ++i)
    if (!(high[i] > low[i]) || !std::isfinite(high[i]) || !std::isfinite(low[i]))
      throw std::invalid_argument("window core must have positive finite extent in every coordinate");
  if (!(margin >= 0.0) || !std::isfinite(margin))
    throw std::invalid_argument("window margin must be finite and >= 0");
}

std::array<double, 3> Window::core_sides() const {
  std::array<double, 3> s{};
  for (int i = 0; i < d; ++i) s[i] = high[i] - low[i];
  return s;
}

std::array<double, 3> Window::outer_low() const {
  std::array<double, 3> s{};
  for (int i = 0; i < d; ++i) s[i] = low[i] - margin;
  return s;
}

std::array<double, 3> Window::outer_high() const {
  std::array<double, 3> s{};
  for (int i = 0; i < d; ++i) s[i] = high[i] + margin;
  return s;
}

std::array<double, 3> Window::outer_sides() const {
  std::array<double, 3> s{};
  for (int i = 0; i < d; ++i) s[i] = high[i] - low[i] + 2.0 * margin;
  return s;
}

double Window::core_volume() const {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= high[i] - low[i];
  return v;
}

bool Window::in_core(const std::array<double, 3>& x) const {
  for (int i = 0; i < d; ++i)
    if (x[i] < low[i] || x[i] > high[i]) return false;
  return true;
}

BooleanSample BooleanSample::with_kernel(WeightKernel k) const {
  BooleanSample out = *this;
  out.kernel = k;
  for (std::size_t i = 0; i < out.grains.size(); ++i)
    out.grains[i].weight = weight_from_mark(k, out.grains[i].radius, marks[i]);
  return out;
}

std::size_t BooleanSample::core_count() const {
  return static_cast<std::size_t>(std::count_if(
      grains.begin(), grains.end(), [&](const Grain& g) { return window.in_core(g.center); }));
}

std::size_t ThinnedSample::core_count() const {
  return static_cast<std::size_t>(std::count_if(
      retained.begin(), retained.end(), [&](const Grain& g) { return window.in_core(g.center); }));
}

namespace {

void require_finite_volume_moment(const RadiusLaw& law, int d) {
  if (!law.has_finite_moment(d))
    throw std::domain_error("radius law has infinite moment of order d; the Boolean model is not defined");
}

// lambda * sum_k coeff_k * integral of r^k over `range`.
double steiner_mass(double lambda, const RadiusLaw& law, std::span<const double> sides,
                    const RadiusRange& range) {
  const int d = static_cast<int>(sides.size());
  std::vector<double> coeff(d + 1);
  box_dilation_coefficients(sides, coeff);
  double total = 0.0;
  for (int k = 0; k <= d; ++k) total += coeff[k] * law.partial_moment(k, range);
  return lambda * total;
}

}  // namespace

double expected_hitting_count(double lambda, const RadiusLaw& law, std::span<const double> sides) {
  require_finite_volume_moment(law, static_cast<int>(sides.size()));
  return steiner_mass(lambda, law, sides, RadiusRange::all());
}

double margin_bias_bound(double lambda, const RadiusLaw& law, const Window& window, double margin) {
  window.validate();
  require_finite_volume_moment(law, window.d);
  if (!(margin >= 0.0)) throw std::invalid_argument("margin must be >= 0");
  const auto sides = window.core_sides();
  return steiner_mass(lambda, law, std::span<const double>(sides.data(), window.d),
                      RadiusRange::above(0.5 * margin, false));
}

MarginChoice default_margin(double lambda, const RadiusLaw& law, const Window& window,
                            double epsilon, double max_margin) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("bias tolerance epsilon must be positive");
  if (!(max_margin >= 0.0)) throw std::invalid_argument("max margin must be >= 0");
  auto bound = [&](double m) { return margin_bias_bound(lambda, law, window, m); };
  if (bound(0.0) < epsilon) return {0.0, bound(0.0), false};
  if (!(bound(max_margin) < epsilon)) return {max_margin, bound(max_margin), true};
  double lo = 0.0, hi = max_margin;
  for (int it = 0; it < 200 && hi - lo > 1e-9 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (bound(mid) < epsilon ? hi : lo) = mid;
  }
  return {hi, bound(hi), false};
}

BooleanSample sample_boolean(double lambda, const RadiusLaw& law, WeightKernel kernel,
                             const Window& window, std::uint64_t seed, std::uint64_t replication) {
  window.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive and finite");
  const int d = window.d;
  require_finite_volume_moment(law, d);

  const auto lo = window.outer_low();
  const auto sides = window.outer_sides();
  std::vector<double> coeff(d + 1);
  box_dilation_coefficients(std::span<const double>(sides.data(), d), coeff);
  // Radii of hitting grains follow |W_M (+) B_r| F(dr): a mixture over the
  // Steiner terms, component k being the r^k size-biased law.
  std::vector<double> cumulative(d + 1);
  double mass = 0.0;
  for (int k = 0; k <= d; ++k) {
    mass += coeff[k] * law.partial_moment(k, RadiusRange::all());
    cumulative[k] = mass;
  }
  const double mean = lambda * mass;
  if (!std::isfinite(mean)) throw std::domain_error("expected grain count is not finite");

  BooleanSample out;
  out.kernel = kernel;
  out.window = window;
  out.lambda = lambda;
  out.seed = seed;
  out.replication = replication;
  out.expected_count = mean;
  out.bias_bound = margin_bias_bound(lambda, law, window, window.margin);

  const CounterRng root = CounterRng::from_seed(seed).substream(replication);
  CounterRng counts = root.substream(0);
  CounterRng radii = root.substream(1);
  CounterRng centers = root.substream(2);
  CounterRng weights = root.substream(3);

  std::poisson_distribution<std::uint64_t> poisson(mean);
  const std::uint64_t n = poisson(counts);
  out.grains.reserve(n);
  out.marks.reserve(n);
  for (std::uint64_t g = 0; g < n; ++g) {
    const double pick = radii.uniform() * mass;
    int k = 0;
    while (k < d && cumulative[k] <= pick) ++k;
    const double r = law.sample_size_biased(k, radii.uniform_positive());

    Grain grain;
    grain.radius = r;
    for (;;) {
      double dist2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const double x = lo[i] - r + (sides[i] + 2.0 * r) * centers.uniform();
        grain.center[i] = x;
        const double gap = std::max({lo[i] - x, x - (lo[i] + sides[i]), 0.0});
        dist2 += gap * gap;
      }
      if (dist2 <= r * r) break;
    }
    const double mark = weights.uniform_open();
    grain.weight = weight_from_mark(kernel, r, mark);
    out.grains.push_back(grain);
    out.marks.push_back(mark);
  }
  return out;
}

namespace {

ThinnedSample make_thinned(const BooleanSample& sample, WeightKernel kernel,
                           const std::vector<Grain>& grains, const std::vector<char>& removed) {
  ThinnedSample out;
  out.kernel = kernel;
  out.window = sample.window;
  out.lambda = sample.lambda;
  out.seed = sample.seed;
  out.replication = sample.replication;
  out.bias_bound = sample.bias_bound;
  out.parent_size = grains.size();
  for (std::size_t i = 0; i < grains.size(); ++i) {
    if (removed[i]) continue;
    out.retained.push_back(grains[i]);
    out.parent_index.push_back(i);
  }
  return out;
}

std::vector<Grain> weighted_grains(const BooleanSample& sample, WeightKernel kernel) {
  if (kernel == sample.kernel) return sample.grains;
  return sample.with_kernel(kernel).grains;
}

}  // namespace

ThinnedSample thin(const BooleanSample& sample) { return thin(sample, sample.kernel); }

ThinnedSample thin(const BooleanSample& sample, WeightKernel kernel) {
  const std::vector<Grain> grains = weighted_grains(sample, kernel);
  std::vector<char> removed(grains.size(), 0);
  if (grains.size() > 1) {
    std::vector<double> radii;
    radii.reserve(grains.size());
    for (const Grain& g : grains) radii.push_back(g.radius);
    auto mid = radii.begin() + static_cast<std::ptrdiff_t>(radii.size() / 2);
    std::nth_element(radii.begin(), mid, radii.end());
    const double cell = *mid;
    const Window& w = sample.window;
    auto lo = w.outer_low();
    auto hi = w.outer_high();
    const double pad = 8.0 * cell;
    for (int i = 0; i < w.d; ++i) {
      lo[i] -= pad;
      hi[i] += pad;
    }
    const SpatialIndex index(grains, w.d, lo, hi, cell);
    index.for_each_neighbor_pair([&](std::size_t i, std::size_t j) {
      if (grains[i].weight >= grains[j].weight) removed[j] = 1;
      if (grains[j].weight >= grains[i].weight) removed[i] = 1;
    });
  }
  return make_thinned(sample, kernel, grains, removed);
}

ThinnedSample thin_bruteforce(const BooleanSample& sample, WeightKernel kernel) {
  const std::vector<Grain> grains = weighted_grains(sample, kernel);
  const int d = sample.window.d;
  std::vector<char> removed(grains.size(), 0);
  for (std::size_t i = 0; i < grains.size(); ++i)
    for (std::size_t j = 0; j < grains.size() && !removed[i]; ++j)
      if (j != i && obstructs(grains[j], grains[i], d)) removed[i] = 1;
  return make_thinned(sample, kernel, grains, removed);
}

double min_clearance(std::span<const Grain> grains, int d) {
  double best = kInfinity;
  for (std::size_t i = 0; i < grains.size(); ++i)
    for (std::size_t j = i + 1; j < grains.size(); ++j) {
      double dist2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double delta = grains[i].center[k] - grains[j].center[k];
        dist2 += delta * delta;
      }
      best = std::min(best, std::sqrt(dist2) - grains[i].radius - grains[j].radius);
    }
  return best;
}

std::vector<char> retained_flags(const ThinnedSample& thinned) {
  std::vector<char> flags(thinned.parent_size, 0);
  for (std::size_t i : thinned.parent_index) flags[i] = 1;
  return flags;
}

void write_grain_csv(std::ostream& os, const BooleanSample& sample, std::span<const char> retained,
                     WeightKernel kernel, std::span<const std::string> header_lines) {
  if (!retained.empty() && retained.size() != sample.grains.size())
    throw std::invalid_argument("retained flags do not match the sample size");
  char buf[128];
  for (const auto& line : header_lines) os << "# " << line << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", sample.lambda);
  os << "# seed=" << sample.seed << " replication=" << sample.replication << " lambda=" << buf
     << " kernel=" << to_string(kernel);
  std::snprintf(buf, sizeof buf, " margin=%.17g bias_bound=%.17g", sample.window.margin, sample.bias_bound);
  os << buf << '\n';
  const int d = sample.window.d;
  for (int i = 1; i <= d; ++i) os << 'x' << i << ',';
  os << "radius,weight,retained\n";
  for (std::size_t j = 0; j < sample.grains.size(); ++j) {
    const Grain& g = sample.grains[j];
    for (int i = 0; i < d; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", g.center[i]);
      os << buf;
    }
    const double weight = weight_from_mark(kernel, g.radius, sample.marks[j]);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", g.radius, weight,
                  retained.empty() ? 1 : static_cast<int>(retained[j] != 0));
    os << buf;
  }
}

}  // namespace hardcore
