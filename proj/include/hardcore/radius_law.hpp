#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hardcore/quadrature.hpp"
#include "hardcore/rng.hpp"

namespace hardcore {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Interval of radii with explicit end conventions. Only matters for laws
/// with atoms; continuous parts ignore closedness.
struct RadiusRange {
  double lo = 0.0;
  double hi = kInfinity;
  bool lo_closed = true;
  bool hi_closed = true;

  static RadiusRange all() { return {}; }
  static RadiusRange none() { return {1.0, 0.0, false, false}; }
  /// (a, inf) when open, [a, inf) when closed.
  static RadiusRange above(double a, bool closed = false) { return {a, kInfinity, closed, true}; }
  /// [0, b].
  static RadiusRange up_to(double b) { return {0.0, b, true, true}; }

  bool contains(double r) const {
    const bool above_lo = lo_closed ? r >= lo : r > lo;
    const bool below_hi = hi_closed ? r <= hi : r < hi;
    return above_lo && below_hi;
  }
  bool empty() const { return hi < lo || (hi == lo && !(lo_closed && hi_closed)); }
  RadiusRange intersect(const RadiusRange& o) const;
};

/// Options for integrating a function against F over [lo, hi]. The
/// integrand must carry any exact indicator itself; lo/hi only bound the
/// region where it can be nonzero (atoms inside [lo, hi] are included).
struct ExpectOptions {
  double lo = 0.0;
  double hi = kInfinity;
  std::span<const double> breakpoints{};
  /// Polynomial growth of the integrand as r -> inf (used by the tail map).
  double growth = 0.0;
  quad::Tolerance tol{};
};

/// The grain radius distribution F.
class RadiusLaw {
 public:
  enum class Kind { pareto, deterministic, tabulated };

  /// F(r) = 1 - (scale / r)^alpha for r >= scale.
  static RadiusLaw pareto(double alpha, double scale = 1.0);
  static RadiusLaw deterministic(double radius);
  /// Piecewise-linear CDF through (radii[i], cdf[i]); both strictly
  /// increasing, last cdf equal to 1. A positive first cdf value is an atom.
  static RadiusLaw tabulated(std::vector<double> radii, std::vector<double> cdf);
  /// Two-column text file (radius, cdf); '#' starts a comment.
  static RadiusLaw load_table(const std::filesystem::path& path);

  Kind kind() const;
  std::string describe() const;

  // Pareto parameters; throw std::logic_error for other kinds.
  double alpha() const;
  double scale() const;
  /// The constant slowly varying factor: F̄(r) = ell * r^-alpha for large r.
  double slowly_varying_constant() const;

  /// F̄(r) = P(R > r).
  double tail(double r) const;
  double cdf(double r) const { return 1.0 - tail(r); }
  /// Smallest r with F̄(r) <= u, for u in (0, 1].
  double upper_quantile(double u) const;
  double median() const { return upper_quantile(0.5); }
  double sample(CounterRng& rng) const { return upper_quantile(rng.uniform_positive()); }

  /// Draw from r^k F(dr) / E[R^k] with upper-tail uniform u in (0, 1].
  double sample_size_biased(int k, double u) const;

  /// Probability mass sitting exactly at r.
  double atom(double r) const;
  double lower_support() const;
  double upper_support() const;

  bool has_finite_moment(double p) const;
  /// Integral of r^p over the range; std::domain_error when divergent.
  double partial_moment(double p, const RadiusRange& range) const;
  /// Integral of r^p F(dr) over (a, inf).
  double moment_integral(double p, double a = 0.0) const;
  /// Karamata tail asymptote (alpha/(alpha-p)) a^{-(alpha-p)} F̄(x) x^p.
  /// Pareto only; std::domain_error otherwise.
  double karamata_asymptote(double p, double a, double x) const;

  template <class F>
  quad::Result expect(F&& f, const ExpectOptions& opt = {}) const;

  template <class F>
  double expect_value(F&& f, const ExpectOptions& opt = {}) const {
    return expect(std::forward<F>(f), opt).value;
  }

  const std::vector<double>& table_radii() const;
  const std::vector<double>& table_cdf() const;

 private:
  struct Pareto {
    double alpha, scale;
  };
  struct Deterministic {
    double radius;
  };
  struct Tabulated {
    std::vector<double> radii, cdf;
  };
  using Variant = std::variant<Pareto, Deterministic, Tabulated>;

  explicit RadiusLaw(Variant v) : law_(std::move(v)) {}

  Variant law_;
};

template <class F>
quad::Result RadiusLaw::expect(F&& f, const ExpectOptions& opt) const {
  quad::Result total;
  if (!(opt.hi >= opt.lo)) return total;

  if (const auto* p = std::get_if<Pareto>(&law_)) {
    const double a = std::max(opt.lo, p->scale);
    const double b = opt.hi;
    if (!(b > a)) return total;
    const double gamma = p->alpha - opt.growth;
    if (!(gamma > 0.0))
      throw std::domain_error("integrand grows too fast for the Pareto tail");
    // u = (scale/r)^gamma maps (a, b) onto (u_lo, u_hi) and leaves a
    // bounded integrand when f(r) ~ r^growth.
    const double u_hi = std::pow(p->scale / a, gamma);
    const double u_lo = std::isfinite(b) ? std::pow(p->scale / b, gamma) : 0.0;
    const double inv_gamma = 1.0 / gamma;
    const double w_exp = opt.growth / gamma;
    const double jac = p->alpha / gamma;
    auto mapped = [&](double u) -> double {
      const double r = p->scale * std::pow(u, -inv_gamma);
      if (!std::isfinite(r)) return 0.0;
      const double v = f(r);
      // Overflowing integrands only occur where the mapped measure is below 1e-100.
      if (v == 0.0 || std::isinf(v)) return 0.0;
      return v * jac * std::pow(u, w_exp);
    };
    std::vector<double> ubreaks;
    ubreaks.reserve(opt.breakpoints.size());
    for (double r : opt.breakpoints)
      if (r > a && r < b) ubreaks.push_back(std::pow(p->scale / r, gamma));
    return quad::integrate(mapped, u_lo, u_hi, ubreaks, opt.tol);
  }

  if (const auto* d = std::get_if<Deterministic>(&law_)) {
    if (d->radius >= opt.lo && d->radius <= opt.hi) total.value = f(d->radius);
    return total;
  }

  const auto& t = std::get<Tabulated>(law_);
  if (t.cdf.front() > 0.0 && t.radii.front() >= opt.lo && t.radii.front() <= opt.hi)
    total.value += t.cdf.front() * f(t.radii.front());
  for (std::size_t i = 0; i + 1 < t.radii.size(); ++i) {
    const double a = std::max(t.radii[i], opt.lo);
    const double b = std::min(t.radii[i + 1], opt.hi);
    if (!(b > a)) continue;
    const double density = (t.cdf[i + 1] - t.cdf[i]) / (t.radii[i + 1] - t.radii[i]);
    auto weighted = [&](double r) { return density * f(r); };
    total += quad::integrate(weighted, a, b, opt.breakpoints, opt.tol);
  }
  return total;
}

}  // namespace hardcore
