#include "hardcore/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace hardcore {

void require_dimension(int d, int max_dimension) {
  if (d < 1 || d > max_dimension)
    throw std::invalid_argument("dimension " + std::to_string(d) + " outside 1.." +
                                std::to_string(max_dimension));
}

namespace {

struct UnitBallTable {
  double v[kMaxVolumeDimension + 1];
  UnitBallTable() {
    v[0] = 1.0;
    for (int d = 1; d <= kMaxVolumeDimension; ++d)
      v[d] = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  }
};

const UnitBallTable& unit_balls() {
  static const UnitBallTable table;
  return table;
}

}  // namespace

double unit_ball_volume(int d) {
  require_dimension(d);
  return unit_balls().v[d];
}

double ball_volume(int d, double r) { return unit_ball_volume(d) * std::pow(r, d); }

double sphere_area(int d, double r) {
  return d * unit_ball_volume(d) * std::pow(r, d - 1);
}

namespace {

// Cap of height h in [0, r]: half ball times I_x((d+1)/2, 1/2), x = 1 - (1 - h/r)^2.
double small_cap(int d, double r, double h) {
  const double f = h / r;
  const double x = std::clamp(f * (2.0 - f), 0.0, 1.0);
  return 0.5 * unit_ball_volume(d) * std::pow(r, d) * boost::math::ibeta(0.5 * (d + 1), 0.5, x);
}

double cap_by_height(int d, double r, double h) {
  h = std::clamp(h, 0.0, 2.0 * r);
  if (h <= r) return small_cap(d, r, h);
  return unit_ball_volume(d) * std::pow(r, d) - small_cap(d, r, 2.0 * r - h);
}

// x - sin(x), accurate for small x.
double chord_excess(double x) {
  if (x > 0.5) return x - std::sin(x);
  double term = x * x * x / 6.0, sum = 0.0;
  for (int k = 1; k < 12 && term != 0.0; ++k) {
    sum += term;
    term *= -x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

double circle_segment(double r, double h) {
  h = std::clamp(h, 0.0, 2.0 * r);
  if (h > r) return std::numbers::pi * r * r - circle_segment(r, 2.0 * r - h);
  // Central angle x of the chord cut off at height h.
  const double x = 4.0 * std::asin(std::sqrt(0.5 * h / r));
  return 0.5 * r * r * chord_excess(x);
}

bool validate(const LensSpec& s) {
  return std::isfinite(s.r1) && std::isfinite(s.r2) && std::isfinite(s.u) && s.r1 >= 0.0 &&
         s.r2 >= 0.0 && s.u >= 0.0;
}

// Sum of the two caps cut by the radical hyperplane. Cap heights are built
// from differences of the inputs so near-tangent lenses stay accurate.
template <class Cap>
double lens_from_caps(int d, const LensSpec& s, Cap cap) {
  const double small = std::min(s.r1, s.r2);
  if (!(small > 0.0) || s.u >= s.r1 + s.r2) return 0.0;
  if (s.u <= std::abs(s.r1 - s.r2)) return unit_ball_volume(d) * std::pow(small, d);
  const double overlap = (s.r1 + s.r2) - s.u;
  const double h1 = overlap * ((s.u - s.r1) + s.r2) / (2.0 * s.u);
  const double h2 = overlap * ((s.u - s.r2) + s.r1) / (2.0 * s.u);
  return std::max(0.0, cap(s.r1, h1) + cap(s.r2, h2));
}

}  // namespace

double cap_volume(int d, double r, double offset) {
  require_dimension(d);
  if (!(r > 0.0)) return 0.0;
  const double a = std::clamp(offset, -r, r);
  return cap_by_height(d, r, r - a);
}

double ball_intersection_volume_beta(int d, const LensSpec& spec) {
  require_dimension(d);
  if (!validate(spec)) throw std::invalid_argument("lens radii and distance must be finite and >= 0");
  return lens_from_caps(d, spec, [d](double r, double h) { return cap_by_height(d, r, h); });
}

double ball_intersection_volume(int d, const LensSpec& spec) {
  switch (d) {
    case 1: {
      if (!validate(spec)) throw std::invalid_argument("lens radii and distance must be finite and >= 0");
      const double lo = std::max(-spec.r1, spec.u - spec.r2);
      const double hi = std::min(spec.r1, spec.u + spec.r2);
      return std::max(0.0, hi - lo);
    }
    case 2:
      if (!validate(spec)) throw std::invalid_argument("lens radii and distance must be finite and >= 0");
      return lens_from_caps(2, spec, circle_segment);
    default:
      return ball_intersection_volume_beta(d, spec);
  }
}

void box_dilation_coefficients(std::span<const double> sides, std::span<double> out) {
  const int d = static_cast<int>(sides.size());
  require_dimension(d);
  if (out.size() < sides.size() + 1) throw std::invalid_argument("coefficient buffer too small");
  // Elementary symmetric polynomials e_j of the side lengths.
  std::vector<double> e(d + 1, 0.0);
  e[0] = 1.0;
  for (double side : sides)
    for (int j = d; j >= 1; --j) e[j] += e[j - 1] * side;
  for (int k = 0; k <= d; ++k) {
    const double kappa = k == 0 ? 1.0 : unit_ball_volume(k);
    out[k] = kappa * e[d - k];
  }
}

double box_dilation_volume(std::span<const double> sides, double r) {
  std::vector<double> c(sides.size() + 1);
  box_dilation_coefficients(sides, c);
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * r + c[k];
  return v;
}

}  // namespace hardcore
