#include "hardcore/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hardcore/geometry.hpp"
#include "hardcore/spatial_index.hpp"

namespace hardcore {

GrainSet view(const BooleanSample& s) { return {s.grains, s.window}; }
GrainSet view(const ThinnedSample& s) { return {s.retained, s.window}; }

Estimate summarize(std::span<const double> per_replication) {
  Estimate e;
  double sum = 0.0;
  for (double v : per_replication)
    if (std::isfinite(v)) {
      sum += v;
      ++e.n;
    }
  if (e.n == 0) {
    e.mean = e.std_error = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  e.mean = sum / static_cast<double>(e.n);
  if (e.n < 2) {
    e.std_error = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  double ss = 0.0;
  for (double v : per_replication)
    if (std::isfinite(v)) ss += (v - e.mean) * (v - e.mean);
  e.std_error = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  return e;
}

namespace {

SpatialIndex core_index(const GrainSet& sample) {
  const Window& w = sample.window;
  std::vector<double> radii;
  radii.reserve(sample.grains.size());
  for (const Grain& g : sample.grains) radii.push_back(g.radius);
  double cell = 0.0;
  if (!radii.empty()) {
    auto mid = radii.begin() + static_cast<std::ptrdiff_t>(radii.size() / 2);
    std::nth_element(radii.begin(), mid, radii.end());
    cell = *mid;
  }
  const auto sides = w.core_sides();
  const double longest = *std::max_element(sides.begin(), sides.begin() + w.d);
  if (!(cell > 0.0)) cell = longest / 64.0;
  return SpatialIndex(sample.grains, w.d, w.low, w.high, cell, std::size_t{1} << 22, true);
}

void require_core(const Window& w) {
  w.validate();
  if (!(w.core_volume() > 0.0)) throw std::invalid_argument("empty core window");
}

}  // namespace

double covered_fraction(const GrainSet& sample, std::size_t probes, CounterRng rng) {
  const Window& w = sample.window;
  require_core(w);
  if (probes == 0) throw std::invalid_argument("need at least one probe");
  if (sample.grains.empty()) return 0.0;
  const SpatialIndex index = core_index(sample);
  const int d = w.d;
  const auto sides = w.core_sides();
  const auto m = static_cast<std::size_t>(
      std::max(1.0, std::round(std::pow(static_cast<double>(probes), 1.0 / d))));
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  std::size_t hits = 0;
  std::array<double, 3> x{};
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::size_t rest = cell;
    for (int i = 0; i < d; ++i) {
      const std::size_t k = rest % m;
      rest /= m;
      x[i] = w.low[i] + (static_cast<double>(k) + rng.uniform()) / static_cast<double>(m) * sides[i];
    }
    if (index.covered(x)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

Estimate estimate_volume_fraction(std::span<const GrainSet> samples, std::size_t probes, std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::vector<double> values;
  const CounterRng root = CounterRng::from_seed(seed);
  for (std::size_t i = 0; i < samples.size(); ++i)
    values.push_back(covered_fraction(samples[i], probes, root.substream(i)));
  return summarize(values);
}

Estimate estimate_intensity(std::span<const GrainSet> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::vector<double> values;
  for (const GrainSet& s : samples) {
    require_core(s.window);
    const auto count = std::count_if(s.grains.begin(), s.grains.end(),
                                     [&](const Grain& g) { return s.window.in_core(g.center); });
    values.push_back(static_cast<double>(count) / s.window.core_volume());
  }
  return summarize(values);
}

std::vector<std::array<double, 3>> probe_directions(int d) {
  require_dimension(d, kMaxSimulationDimension);
  std::vector<std::array<double, 3>> dirs;
  if (d == 1) return {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
  if (d == 2) {
    for (int k = 0; k < 8; ++k) {
      const double a = k * std::acos(-1.0) / 8.0;
      dirs.push_back({std::cos(a), std::sin(a), 0.0});
    }
    return dirs;
  }
  // Axes, face diagonals and body diagonals of the cube, one per line.
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y)
      for (int z = -1; z <= 1; ++z) {
        const int first = x != 0 ? x : (y != 0 ? y : z);
        if (first <= 0) continue;
        const double n = std::sqrt(static_cast<double>(x * x + y * y + z * z));
        dirs.push_back({x / n, y / n, z / n});
      }
  return dirs;
}

std::vector<double> cover_covariance_once(const GrainSet& sample, std::span<const double> lags,
                                          std::size_t probes, CounterRng rng) {
  const Window& w = sample.window;
  require_core(w);
  if (lags.empty()) return {};
  if (probes == 0) throw std::invalid_argument("need at least one probe");
  const int d = w.d;
  const double max_lag = *std::max_element(lags.begin(), lags.end());
  if (*std::min_element(lags.begin(), lags.end()) < 0.0) throw std::invalid_argument("lags must be >= 0");
  const auto sides = w.core_sides();
  for (int i = 0; i < d; ++i)
    if (!(2.0 * max_lag < sides[i]))
      throw std::invalid_argument("largest lag exceeds half the core extent");
  std::vector<double> out(lags.size(), 0.0);
  if (sample.grains.empty()) return out;

  const SpatialIndex index = core_index(sample);
  const auto dirs = probe_directions(d);
  // Kronecker sequence with the generalized golden ratio.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  std::array<double, 3> step{}, shift{};
  for (int i = 0; i < d; ++i) {
    step[i] = std::fmod(std::pow(1.0 / phi, i + 1), 1.0);
    shift[i] = rng.uniform();
  }
  std::vector<std::size_t> joint(lags.size(), 0);
  std::size_t hits = 0;
  std::array<double, 3> x{}, y{};
  for (std::size_t j = 0; j < probes; ++j) {
    for (int i = 0; i < d; ++i) {
      const double frac = std::fmod(shift[i] + static_cast<double>(j) * step[i], 1.0);
      x[i] = w.low[i] + max_lag + frac * (sides[i] - 2.0 * max_lag);
    }
    if (!index.covered(x)) continue;
    ++hits;
    for (std::size_t l = 0; l < lags.size(); ++l)
      for (const auto& e : dirs) {
        for (int i = 0; i < d; ++i) y[i] = x[i] + lags[l] * e[i];
        if (index.covered(y)) ++joint[l];
      }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(probes);
  const double pairs = static_cast<double>(probes) * static_cast<double>(dirs.size());
  for (std::size_t l = 0; l < lags.size(); ++l) out[l] = static_cast<double>(joint[l]) / pairs - p * p;
  return out;
}

CovarianceEstimate aggregate_replications(std::span<const double> lags,
                                          const std::vector<std::vector<double>>& rows) {
  CovarianceEstimate est;
  est.lags.assign(lags.begin(), lags.end());
  est.replications = rows.size();
  std::vector<double> column(rows.size());
  for (std::size_t l = 0; l < lags.size(); ++l) {
    for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][l];
    const Estimate e = summarize(column);
    est.values.push_back(e.mean);
    est.std_error.push_back(e.std_error);
  }
  return est;
}

namespace {

void require_increasing(std::span<const double> lags) {
  for (std::size_t i = 1; i < lags.size(); ++i)
    if (!(lags[i] > lags[i - 1])) throw std::invalid_argument("lags must be strictly increasing");
}

}  // namespace

CovarianceEstimate estimate_cover_covariance(std::span<const GrainSet> samples, std::span<const double> lags,
                                             std::size_t probes, std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  require_increasing(lags);
  const CounterRng root = CounterRng::from_seed(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < samples.size(); ++i)
    rows.push_back(cover_covariance_once(samples[i], lags, probes, root.substream(i)));
  return aggregate_replications(lags, rows);
}

std::vector<double> pair_correlation_once(const GrainSet& sample, std::span<const double> lags,
                                          double bandwidth) {
  const Window& w = sample.window;
  require_core(w);
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  const int d = w.d;
  const auto sides = w.core_sides();
  const double reach = lags.empty() ? 0.0 : *std::max_element(lags.begin(), lags.end()) + bandwidth;
  for (int i = 0; i < d; ++i)
    if (!(reach < sides[i])) throw std::invalid_argument("largest lag plus bandwidth exceeds the core extent");

  std::vector<std::array<double, 3>> pts;
  for (const Grain& g : sample.grains)
    if (w.in_core(g.center)) pts.push_back(g.center);
  const std::size_t n = pts.size();
  std::vector<double> out(lags.size(), std::numeric_limits<double>::quiet_NaN());
  if (n < 2) return out;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });

  std::vector<double> weight(lags.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n && pts[j][0] - pts[i][0] <= reach; ++j) {
      double dist2 = 0.0, overlap = 1.0;
      for (int k = 0; k < d; ++k) {
        const double v = pts[j][k] - pts[i][k];
        dist2 += v * v;
        overlap *= sides[k] - std::abs(v);
      }
      const double dist = std::sqrt(dist2);
      if (dist > reach) continue;
      for (std::size_t l = 0; l < lags.size(); ++l)
        if (std::abs(dist - lags[l]) <= bandwidth) weight[l] += 2.0 / overlap;
    }
  const double volume = w.core_volume();
  const double intensity2 = static_cast<double>(n) * static_cast<double>(n - 1) / (volume * volume);
  const double kappa = unit_ball_volume(d);
  for (std::size_t l = 0; l < lags.size(); ++l) {
    const double inner = std::max(lags[l] - bandwidth, 0.0);
    const double shell = kappa * (std::pow(lags[l] + bandwidth, d) - std::pow(inner, d));
    out[l] = weight[l] / (intensity2 * shell) - 1.0;
  }
  return out;
}

CovarianceEstimate estimate_pair_correlation(std::span<const GrainSet> samples, std::span<const double> lags,
                                             double bandwidth) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  require_increasing(lags);
  std::vector<std::vector<double>> rows;
  for (const GrainSet& s : samples) rows.push_back(pair_correlation_once(s, lags, bandwidth));
  return aggregate_replications(lags, rows);
}

std::vector<double> radius_exceedances(const GrainSet& sample, std::span<const double> grid) {
  require_increasing(grid);
  std::vector<double> radii;
  for (const Grain& g : sample.grains)
    if (sample.window.in_core(g.center)) radii.push_back(g.radius);
  std::sort(radii.begin(), radii.end());
  std::vector<double> out;
  out.reserve(grid.size() + 1);
  for (double r : grid)
    out.push_back(static_cast<double>(radii.end() - std::upper_bound(radii.begin(), radii.end(), r)));
  out.push_back(static_cast<double>(radii.size()));
  return out;
}

CovarianceEstimate radius_tail_from_counts(std::span<const double> grid,
                                           const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("no samples");
  const std::size_t reps = rows.size();
  double total = 0.0;
  for (const auto& row : rows) {
    if (row.size() != grid.size() + 1) throw std::invalid_argument("count row does not match the grid");
    total += row.back();
  }
  if (total == 0.0) throw std::domain_error("no grains in the core");

  CovarianceEstimate est;
  est.lags.assign(grid.begin(), grid.end());
  est.replications = reps;
  const double mean_count = total / static_cast<double>(reps);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double sum = 0.0;
    for (const auto& row : rows) sum += row[j];
    const double ratio = sum / total;
    double se = std::numeric_limits<double>::quiet_NaN();
    if (reps >= 2) {
      double ss = 0.0;
      for (const auto& row : rows) {
        const double resid = row[j] - ratio * row.back();
        ss += resid * resid;
      }
      se = std::sqrt(ss / static_cast<double>(reps * (reps - 1))) / mean_count;
    }
    est.values.push_back(ratio);
    est.std_error.push_back(se);
  }
  return est;
}

CovarianceEstimate empirical_radius_tail(std::span<const GrainSet> samples, std::span<const double> grid) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::vector<std::vector<double>> rows;
  for (const GrainSet& s : samples) rows.push_back(radius_exceedances(s, grid));
  return radius_tail_from_counts(grid, rows);
}

TailFit fit_tail_exponent(std::span<const double> lags, std::span<const double> values, double lo, double hi) {
  if (lags.size() != values.size()) throw std::invalid_argument("lag and value columns differ in length");
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("fit range must satisfy 0 < lo <= hi");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] < lo || lags[i] > hi) continue;
    if (!(values[i] > 0.0))
      throw std::domain_error("nonpositive value inside the fit range at lag " + std::to_string(lags[i]));
    const double x = std::log(lags[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n < 2) throw std::domain_error("fit range holds fewer than two points");
  const double dn = static_cast<double>(n);
  const double vx = sxx - sx * sx / dn;
  const double vy = syy - sy * sy / dn;
  const double cxy = sxy - sx * sy / dn;
  if (!(vx > 0.0)) throw std::domain_error("fit range holds a single distinct lag");
  TailFit fit;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / dn;
  fit.r_squared = vy > 0.0 ? std::min(1.0, cxy * cxy / (vx * vy)) : 1.0;
  fit.lo = lo;
  fit.hi = hi;
  fit.points = n;
  return fit;
}

void write_estimate_csv(std::ostream& os, const CovarianceEstimate& est,
                        std::span<const std::string> header_lines) {
  for (const auto& line : header_lines) os << "# " << line << '\n';
  os << "lag,value,stderr,n\n";
  char buf[128];
  for (std::size_t i = 0; i < est.lags.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu\n", est.lags[i], est.values[i], est.std_error[i],
                  est.replications);
    os << buf;
  }
}

std::string tail_fit_json(const TailFit& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["lo"] = fit.lo;
  j["hi"] = fit.hi;
  return j.dump();
}

}  // namespace hardcore
