#include "hardcore/asymptotics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hardcore/geometry.hpp"

namespace hardcore {

Statistic parse_statistic(std::string_view name) {
  if (name == "cover_covariance") return Statistic::cover_covariance;
  if (name == "two_point") return Statistic::two_point;
  if (name == "radius_tail") return Statistic::radius_tail;
  throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::cover_covariance: return "cover_covariance";
    case Statistic::two_point: return "two_point";
    case Statistic::radius_tail: return "radius_tail";
  }
  return "?";
}

double AsymptoticLaw::evaluate(double x) const {
  switch (kind) {
    case Kind::power_law: return amplitude * std::pow(x, -exponent);
    case Kind::exponential_bound: return amplitude * std::exp(-rate * std::pow(x, power));
    case Kind::none: break;
  }
  return std::nan("");
}

namespace {

AsymptoticLaw power_law(double amplitude, double exponent, std::string note) {
  AsymptoticLaw a;
  a.kind = AsymptoticLaw::Kind::power_law;
  a.amplitude = amplitude;
  a.exponent = exponent;
  a.note = std::move(note);
  return a;
}

AsymptoticLaw exp_bound(double amplitude, double rate, double power, double from, std::string note) {
  AsymptoticLaw a;
  a.kind = AsymptoticLaw::Kind::exponential_bound;
  a.amplitude = amplitude;
  a.rate = rate;
  a.power = power;
  a.valid_from = from;
  a.note = std::move(note);
  return a;
}

AsymptoticLaw no_prediction(std::string note) {
  AsymptoticLaw a;
  a.note = std::move(note);
  return a;
}

bool is_pareto(const ThinnedModel& m) { return m.spec().law.kind() == RadiusLaw::Kind::pareto; }

}  // namespace

RandomConstants random_kernel_constants(const ThinnedModel& model) {
  const ModelSpec& spec = model.spec();
  if (spec.kernel != WeightKernel::random) throw std::invalid_argument("random-kernel constants need the random kernel");
  const int d = spec.d;
  const double lam = spec.lambda;
  const double kappa = unit_ball_volume(d);
  const double c = model.c_alpha_d();
  // q(z, r1, r2) ~ lambda c ell z^-(alpha-d) * S(r1, r2) with
  // S = int int min(x1, x2) exp(-B1 x1 - B2 x2).
  ExpectOptions opt;
  opt.tol = model.options().nested;
  auto slope = [&](double r1, double r2) { return ThinnedModel::Pair(model, r1, r2).random_q_slope(); };
  const double plain = spec.law.expect_value(
      [&](double r1) { return spec.law.expect_value([&](double r2) { return slope(r1, r2); }, opt); }, opt);
  ExpectOptions grown = opt;
  grown.growth = d;
  const double weighted = spec.law.expect_value(
      [&](double r1) {
        return std::pow(r1, d) *
               spec.law.expect_value([&](double r2) { return std::pow(r2, d) * slope(r1, r2); }, grown);
      },
      grown);
  const double ratio = lam / model.thinned_intensity();
  RandomConstants out;
  out.c1 = lam * lam * kappa * kappa * lam * c * weighted;
  out.c2 = ratio * ratio * lam * c * plain;
  return out;
}

AsymptoticLaw boolean_covariance_asymptote(const ThinnedModel& model) {
  if (!is_pareto(model)) return no_prediction("power-law asymptote needs a Pareto radius law");
  const ModelSpec& s = model.spec();
  const double alpha = s.law.alpha();
  const double ell = s.law.slowly_varying_constant();
  const double one_minus_p = 1.0 - model.boolean_volume_fraction();
  return power_law(s.lambda * one_minus_p * one_minus_p * model.c_alpha_d() * ell, alpha - s.d,
                   "Boolean model: lambda (1-p)^2 c ell z^-(alpha-d)");
}

AsymptoticLaw asymptotic_prediction(const ThinnedModel& model, Statistic statistic) {
  const ModelSpec& s = model.spec();
  const int d = s.d;
  const double lam = s.lambda;
  const double kappa = unit_ball_volume(d);
  const double ratio = lam / model.thinned_intensity();
  const double p_th = model.thinned_volume_fraction();

  if (s.kernel == WeightKernel::small) {
    // Bounds from h(r) <= exp(-lambda kappa r^d / 2) once F(r) >= 1/2.
    const double median = s.law.median();
    const double half_rate = 0.5 * lam * kappa;
    switch (statistic) {
      case Statistic::radius_tail:
        return exp_bound(ratio, half_rate, d, median, "small: Fbar_th <= (lambda/lambda_th) exp(-lambda kappa r^d / 2)");
      case Statistic::cover_covariance: {
        const double m1 = kappa * s.law.partial_moment(d, RadiusRange::all());
        return exp_bound(lam * m1 + 2.0 * lam * lam * m1 * m1, half_rate / std::pow(6.0, d), d, 6.0 * median,
                         "small: |k_th| <= (lambda m + 2 lambda^2 m^2) exp(-lambda kappa (z/6)^d / 2)");
      }
      case Statistic::two_point:
        return exp_bound(2.0 * ratio * ratio, half_rate / std::pow(4.0, d), d, 4.0 * median,
                         "small: |xi_th| <= 2 (lambda/lambda_th)^2 exp(-lambda kappa (z/4)^d / 2)");
    }
  }

  if (s.kernel == WeightKernel::isolated && statistic == Statistic::radius_tail)
    return exp_bound(ratio, lam * kappa, d, 0.0, "isolated: Fbar_th <= (lambda/lambda_th) exp(-lambda kappa r^d)");

  if (!is_pareto(model)) return no_prediction("power-law asymptote needs a Pareto radius law");
  const double alpha = s.law.alpha();
  const double ell = s.law.slowly_varying_constant();
  const double c = model.c_alpha_d();

  switch (s.kernel) {
    case WeightKernel::isolated:
      if (statistic == Statistic::cover_covariance)
        return power_law(lam * c * p_th * p_th * ell, alpha - d, "isolated: lambda c p_th^2 ell z^-(alpha-d)");
      return power_law(lam * c * ell, alpha - d, "isolated: lambda c ell z^-(alpha-d)");
    case WeightKernel::large:
      if (statistic == Statistic::cover_covariance)
        return power_law(lam * c * (1.0 - p_th) * (1.0 - p_th) * ell, alpha - d,
                         "large: lambda c (1-p_th)^2 ell z^-(alpha-d)");
      if (statistic == Statistic::two_point)
        return power_law(lam * c * ell, alpha - d, "large: lambda c ell z^-(alpha-d)");
      return power_law(ratio * ell, alpha, "large: (lambda/lambda_th) ell r^-alpha");
    case WeightKernel::random: {
      if (statistic == Statistic::radius_tail)
        return power_law(alpha / (alpha + d) * ell / (model.thinned_intensity() * kappa), alpha + d,
                         "random: (lambda_th kappa)^-1 alpha/(alpha+d) ell r^-(alpha+d)");
      const RandomConstants k = random_kernel_constants(model);
      if (statistic == Statistic::cover_covariance)
        return power_law(k.c1 * ell, alpha - d, "random: c1 ell z^-(alpha-d)");
      return power_law(k.c2 * ell, alpha - d, "random: c2 ell z^-(alpha-d)");
    }
    case WeightKernel::small: break;
  }
  return no_prediction("no result for this kernel and statistic");
}

std::string DecayClass::describe() const {
  switch (kind) {
    case Kind::power: {
      std::ostringstream os;
      os << "power law (" << exponent << ")";
      return os.str();
    }
    case Kind::exponential: return "exponential";
    case Kind::zero: return "zero";
  }
  return "?";
}

DecayClass decay_class(std::string_view model, Statistic statistic, double alpha, int d) {
  using K = DecayClass::Kind;
  const DecayClass lrd{K::power, alpha - d};
  if (model == "original") {
    if (statistic == Statistic::cover_covariance) return lrd;
    if (statistic == Statistic::two_point) return {K::zero, 0.0};
    return {K::power, alpha};
  }
  switch (parse_kernel(model)) {
    case WeightKernel::isolated:
      return statistic == Statistic::radius_tail ? DecayClass{K::exponential, 0.0} : lrd;
    case WeightKernel::random:
      return statistic == Statistic::radius_tail ? DecayClass{K::power, alpha + d} : lrd;
    case WeightKernel::large:
      return statistic == Statistic::radius_tail ? DecayClass{K::power, alpha} : lrd;
    case WeightKernel::small: return {K::exponential, 0.0};
  }
  return {};
}

}  // namespace hardcore
