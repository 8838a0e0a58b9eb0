#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hardcore/analytics.hpp"
#include "hardcore/geometry.hpp"

namespace hardcore {

namespace {

// Integral over the circle |y| = u of lens(|y + z e1|), in d = 2.
double circle_lens(double u, double z, double r1, double r2, const quad::Tolerance& tol) {
  auto lens = [&](double rho) { return ball_intersection_volume(2, {r1, r2, rho}); };
  if (u == 0.0) return 0.0;
  if (z == 0.0) return 2.0 * std::numbers::pi * u * lens(u);
  // rho(phi)^2 = z^2 + u^2 + 2 z u cos(phi) decreases on [0, pi].
  auto phi_at = [&](double rho) {
    return std::acos(std::clamp((rho * rho - z * z - u * u) / (2.0 * z * u), -1.0, 1.0));
  };
  const double reach = r1 + r2;
  const double start = (u + z > reach) ? phi_at(reach) : 0.0;
  if (start >= std::numbers::pi) return 0.0;
  const double kink[] = {phi_at(std::abs(r1 - r2))};
  const double inner = quad::integrate(
                           [&](double phi) {
                             const double rho2 = z * z + u * u + 2.0 * z * u * std::cos(phi);
                             return lens(std::sqrt(std::max(0.0, rho2)));
                           },
                           start, std::numbers::pi, kink, tol)
                           .value;
  return 2.0 * u * inner;
}

}  // namespace

double ThinnedModel::thinned_covariance(double z) const {
  if (!(z >= 0.0)) throw std::domain_error("lag must be >= 0");
  const int d = spec_.d;
  if (d != 1 && d != 2)
    throw std::domain_error("thinned cover covariance is evaluated by quadrature only for d = 1, 2; "
                            "use simulation for higher dimensions");
  const RadiusLaw& law = spec_.law;
  const double lam = spec_.lambda;

  ExpectOptions first_opt;
  first_opt.lo = 0.5 * z;
  first_opt.growth = d;
  first_opt.tol = options_.single;
  const double first = law.expect_value(
      [&](double r) {
        const double h = mean_retention(r);
        if (h == 0.0) return 0.0;
        const double lens = ball_intersection_volume(d, {r, r, z});
        return lens == 0.0 ? 0.0 : lens * h;
      },
      first_opt);

  const quad::Tolerance& geo_tol = options_.inner;
  // X(r1, r2) = int lens(r1, r2, |x|) q(|x - z e1|) dx, written in the
  // distance u = |x - z e1| so q is evaluated once per u.
  auto cross = [&](double r1, double r2) {
    const Pair pair(*this, r1, r2);
    // q is squeezed between -h1 h2 and min(h1, h2).
    if (pair.h1() == 0.0 || pair.h2() == 0.0) return 0.0;
    const double reach = r1 + r2;
    const double gap = std::abs(r1 - r2);
    const double lo = std::max(0.0, z - reach);
    const double hi = z + reach;
    const double breaks[] = {reach, std::abs(z - reach), std::abs(z - gap), z + gap, z};
    auto shell = [&](double u) {
      if (d == 1)
        return ball_intersection_volume(1, {r1, r2, z + u}) +
               ball_intersection_volume(1, {r1, r2, std::abs(z - u)});
      return circle_lens(u, z, r1, r2, geo_tol);
    };
    return quad::integrate(
               [&](double u) {
                 const double k = shell(u);
                 return k == 0.0 ? 0.0 : k * pair.q(u);
               },
               lo, hi, breaks, options_.nested)
        .value;
  };

  ExpectOptions outer;
  outer.growth = d;
  outer.tol = options_.nested;
  const double outer_breaks[] = {z / 4.0, z / 2.0, z};
  outer.breakpoints = outer_breaks;
  const double second = law.expect_value(
      [&](double r1) {
        ExpectOptions inner;
        inner.growth = d;
        inner.tol = options_.nested;
        const double inner_breaks[] = {r1, z - r1, 0.5 * z - r1};
        inner.breakpoints = inner_breaks;
        return law.expect_value([&](double r2) { return cross(r1, r2); }, inner);
      },
      outer);

  return lam * first + lam * lam * second;
}

}  // namespace hardcore
