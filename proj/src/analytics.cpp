#include "hardcore/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hardcore/geometry.hpp"

namespace hardcore {

void ModelSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive and finite");
  require_dimension(d);
  if (!law.has_finite_moment(d))
    throw std::domain_error("radius law needs a finite moment of order d (Pareto alpha > d)");
  if (kernel == WeightKernel::small && law.atom(0.0) > 0.0)
    throw std::domain_error("small-retained weights 1/r are undefined for grains of radius 0");
}

double c_alpha_d(double alpha, int d) {
  require_dimension(d);
  if (!(alpha > d)) throw std::domain_error("c_{alpha,d} diverges unless alpha > d");
  // Pareto(alpha) with scale 1/2 has density 2^-alpha alpha r^{-alpha-1} on
  // r > 1/2, where the lens is supported.
  const RadiusLaw half = RadiusLaw::pareto(alpha, 0.5);
  ExpectOptions opt;
  opt.growth = d;
  opt.tol = {1e-300, 1e-12, 400};
  const double mean = half.expect_value(
      [d](double r) { return ball_intersection_volume(d, {r, r, 1.0}); }, opt);
  return std::pow(2.0, alpha) * mean;
}

Obstructors obstructors(WeightKernel kernel, double w) {
  switch (kernel) {
    case WeightKernel::isolated:
      return w <= 1.0 ? Obstructors{1.0, RadiusRange::all()} : Obstructors{};
    case WeightKernel::random: {
      const double f = std::clamp(1.0 - w, 0.0, 1.0);
      return f > 0.0 ? Obstructors{f, RadiusRange::all()} : Obstructors{};
    }
    case WeightKernel::large:
      return {1.0, RadiusRange::above(w, true)};
    case WeightKernel::small:
      if (w <= 0.0) return {1.0, RadiusRange::all()};
      return {1.0, RadiusRange::up_to(1.0 / w)};
  }
  return {};
}

ThinnedModel::ThinnedModel(ModelSpec spec, AnalyticsOptions options)
    : spec_(std::move(spec)), options_(options) {
  spec_.validate();
  const int d = spec_.d;
  kappa_ = unit_ball_volume(d);
  const double lam = spec_.lambda;
  p_ = -std::expm1(-lam * kappa_ * spec_.law.partial_moment(d, RadiusRange::all()));

  ExpectOptions opt;
  opt.tol = options_.single;
  lambda_th_ = lam * spec_.law.expect_value([this](double r) { return mean_retention(r); }, opt);
  opt.growth = d;
  p_th_ = lam * kappa_ *
          spec_.law.expect_value([this, d](double r) { return std::pow(r, d) * mean_retention(r); }, opt);
}

double ThinnedModel::obstruction_volume(double r, const RadiusRange& range) const {
  const int d = spec_.d;
  double total = 0.0;
  for (int k = 0; k <= d; ++k) {
    const double m = spec_.law.partial_moment(k, range);
    if (m == 0.0) continue;
    total += boost::math::binomial_coefficient<double>(d, k) * std::pow(r, d - k) * m;
  }
  return kappa_ * total;
}

double ThinnedModel::retention_probability(double r, double w) const {
  if (!(r >= 0.0) || !(w >= 0.0)) throw std::domain_error("retention needs r >= 0 and w >= 0");
  const Obstructors obs = obstructors(spec_.kernel, w);
  if (obs.factor == 0.0 || obs.range.empty()) return 1.0;
  return std::exp(-spec_.lambda * obs.factor * obstruction_volume(r, obs.range));
}

double ThinnedModel::mean_retention(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("retention needs r >= 0");
  switch (spec_.kernel) {
    case WeightKernel::isolated: return retention_probability(r, 1.0);
    case WeightKernel::large: return retention_probability(r, r);
    case WeightKernel::small: return retention_probability(r, r > 0.0 ? 1.0 / r : kInfinity);
    case WeightKernel::random: {
      const double b = spec_.lambda * obstruction_volume(r, RadiusRange::all());
      return b > 0.0 ? -std::expm1(-b) / b : 1.0;
    }
  }
  return 0.0;
}

double ThinnedModel::thinned_radius_tail(double r) const {
  if (!(r > 0.0)) return 1.0;
  ExpectOptions opt;
  opt.lo = r;
  opt.tol = options_.single;
  double v = spec_.law.expect_value([this](double s) { return mean_retention(s); }, opt);
  if (const double atom = spec_.law.atom(r); atom > 0.0) v -= atom * mean_retention(r);
  return std::clamp(spec_.lambda * v / lambda_th_, 0.0, 1.0);
}

double ThinnedModel::boolean_covariance(double z) const {
  if (!(z >= 0.0)) throw std::domain_error("lag must be >= 0");
  const double a = average_intersection(z, 0.0, 0.0);
  return (1.0 - p_) * (1.0 - p_) * std::expm1(spec_.lambda * a);
}

double ThinnedModel::average_intersection(double u, double r1, double r2,
                                          const RadiusRange& range) const {
  if (!(u >= 0.0) || !(r1 >= 0.0) || !(r2 >= 0.0))
    throw std::domain_error("average intersection needs nonnegative arguments");
  if (range.empty()) return 0.0;
  const int d = spec_.d;
  // The lens is nonzero exactly when s > t.
  const double t = 0.5 * (u - r1 - r2);
  if (d == 1 && t >= 0.0) {
    // Overlap of [-s-r1, s+r1] and [u-s-r2, u+s+r2] is 2(s - t) once u > |r1 - r2|.
    const RadiusRange live = range.intersect(RadiusRange::above(t, false));
    if (live.empty()) return 0.0;
    const double m1 = spec_.law.partial_moment(1, live);
    const double m0 = spec_.law.partial_moment(0, live);
    return 2.0 * std::max(0.0, m1 - t * m0);
  }
  ExpectOptions opt;
  opt.lo = std::max({t, range.lo, 0.0});
  opt.hi = range.hi;
  opt.growth = d;
  opt.tol = options_.inner;
  return spec_.law.expect_value(
      [&](double s) {
        if (!(s > t) || !range.contains(s)) return 0.0;
        return ball_intersection_volume(d, {s + r1, s + r2, u});
      },
      opt);
}

double ThinnedModel::tau(double u, double r1, double r2, double w) const {
  const Obstructors obs = obstructors(spec_.kernel, w);
  if (obs.factor == 0.0) return 0.0;
  return spec_.lambda * obs.factor * average_intersection(u, r1, r2, obs.range);
}

double ThinnedModel::pair_retention(double u, double r1, double w1, double r2, double w2) const {
  if (u <= r1 + r2) return 0.0;
  return retention_probability(r1, w1) * retention_probability(r2, w2) *
         std::exp(tau(u, r1, r2, std::max(w1, w2)));
}

double ThinnedModel::retention_covariance(double u, double r1, double r2) const {
  return Pair(*this, r1, r2).q(u);
}

double ThinnedModel::c_alpha_d() const { return hardcore::c_alpha_d(spec_.law.alpha(), spec_.d); }

double ThinnedModel::thinned_two_point_correlation(double z) const {
  if (!(z >= 0.0)) throw std::domain_error("lag must be >= 0");
  const RadiusLaw& law = spec_.law;
  ExpectOptions outer;
  outer.tol = options_.nested;
  const double outer_breaks[] = {z / 4.0, z / 3.0, z / 2.0, z};
  outer.breakpoints = outer_breaks;
  const double total = law.expect_value(
      [&](double r1) {
        ExpectOptions inner;
        inner.tol = options_.nested;
        const double inner_breaks[] = {r1, z - r1, (z - r1) / 3.0, z - 3.0 * r1};
        inner.breakpoints = inner_breaks;
        return law.expect_value([&](double r2) { return Pair(*this, r1, r2).q(z); }, inner);
      },
      outer);
  const double ratio = spec_.lambda / lambda_th_;
  return ratio * ratio * total;
}

// ---------------------------------------------------------------------------

double power_exp_moment(int n, double c) {
  if (n < 0 || !(c >= 0.0)) throw std::domain_error("power_exp_moment needs n >= 0 and c >= 0");
  if (c < 1.0) {
    double term = 1.0, sum = 0.0;
    for (int k = 0; k < 60; ++k) {
      const double add = term / (n + k + 1);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      term *= -c / (k + 1);
    }
    return sum;
  }
  const double p = boost::math::gamma_p(n + 1.0, c);
  return std::exp(std::lgamma(n + 1.0) - (n + 1.0) * std::log(c)) * p;
}

namespace {

constexpr int kTaylorTerms = 8;
constexpr double kTaylorLimit = 0.1;
constexpr int kSeriesTerms = 24;
constexpr int kMaxMomentOrder = kTaylorTerms + kSeriesTerms + 1;

// J_n(c) = int_0^1 t^n e^{-c t} dt for n = 0..n_max. Upward recursion is
// stable for n <= c, downward for n > c.
void power_exp_moments(int n_max, double c, double* out) {
  if (c < 1.0) {
    for (int n = 0; n <= n_max; ++n) out[n] = power_exp_moment(n, c);
    return;
  }
  const double e = std::exp(-c);
  const int m = c >= n_max ? n_max : static_cast<int>(c);
  out[0] = -std::expm1(-c) / c;
  for (int n = 1; n <= m; ++n) out[n] = (n * out[n - 1] - e) / c;
  if (n_max > m) {
    out[n_max] = power_exp_moment(n_max, c);
    for (int n = n_max; n > m + 1; --n) out[n - 1] = (c * out[n] + e) / n;
  }
}

// int_0^1 t^n e^{-a t} E(b, t) dt for n = 1..kTaylorTerms, with
// E(b, t) = int_t^1 e^{-b y} dy.
void weighted_tail_moments(double a, double b, double* out) {
  double ja[kMaxMomentOrder + 1];
  if (b >= 0.5) {
    double jab[kTaylorTerms + 1];
    power_exp_moments(kTaylorTerms, a, ja);
    power_exp_moments(kTaylorTerms, a + b, jab);
    const double e = std::exp(-b);
    for (int n = 1; n <= kTaylorTerms; ++n) out[n] = (jab[n] - e * ja[n]) / b;
    return;
  }
  // E(b, t) = sum_m (-b)^m (1 - t^{m+1}) / (m+1)!
  power_exp_moments(kMaxMomentOrder, a, ja);
  for (int n = 1; n <= kTaylorTerms; ++n) {
    double sum = 0.0, coeff = 1.0;
    for (int m = 0; m < kSeriesTerms; ++m) {
      coeff /= (m + 1);
      const double add = coeff * (ja[n] - ja[n + m + 1]);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      coeff *= -b;
    }
    out[n] = sum;
  }
}

// int_0^1 e^{x t} dt.
double exp_mean(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

// int_0^1 e^{-c t} (e^{A t} - 1) dt.
double damped_growth(double A, double c) { return exp_mean(A - c) - exp_mean(-c); }

// Stable E(b, t).
double tail_exp(double b, double t) {
  const double x = b * (1.0 - t);
  const double phi = x > 0.0 ? -std::expm1(-x) / x : 1.0;
  return std::exp(-b * t) * (1.0 - t) * phi;
}

}  // namespace

ThinnedModel::Pair::Pair(const ThinnedModel& model, double r1, double r2)
    : m_(&model), r1_(r1), r2_(r2) {
  if (!(r1 >= 0.0) || !(r2 >= 0.0)) throw std::domain_error("radii must be >= 0");
  h1_ = model.mean_retention(r1);
  h2_ = model.mean_retention(r2);
  const WeightKernel kernel = model.spec_.kernel;
  if (kernel == WeightKernel::random) {
    factor_ = 1.0;
    range_ = RadiusRange::all();
    b1_ = model.spec_.lambda * model.obstruction_volume(r1, range_);
    b2_ = model.spec_.lambda * model.obstruction_volume(r2, range_);
  } else {
    const double w1 = weight_from_mark(kernel, r1, 0.5);
    const double w2 = weight_from_mark(kernel, r2, 0.5);
    const Obstructors obs = obstructors(kernel, std::max(w1, w2));
    factor_ = obs.factor;
    range_ = obs.range;
  }
}

double ThinnedModel::Pair::q(double u) const {
  if (u <= r1_ + r2_) return -h1_ * h2_;
  if (factor_ == 0.0) return 0.0;
  const double A = m_->spec_.lambda * factor_ * m_->average_intersection(u, r1_, r2_, range_);
  if (m_->spec_.kernel == WeightKernel::random) return random_q(A);
  return h1_ * h2_ * std::expm1(A);
}

void ThinnedModel::Pair::ensure_moments() const {
  if (have_moments_) return;
  double m12[kTaylorTerms + 1], m21[kTaylorTerms + 1];
  weighted_tail_moments(b1_, b2_, m12);
  weighted_tail_moments(b2_, b1_, m21);
  for (int n = 1; n <= kTaylorTerms; ++n) moments_[n] = m12[n] + m21[n];
  have_moments_ = true;
}

double ThinnedModel::Pair::random_q_slope() const {
  ensure_moments();
  return moments_[1];
}

double ThinnedModel::Pair::random_q(double A) const {
  if (!(A > 0.0)) return 0.0;
  // With x_i = 1 - w_i: q = int int e^{-B1 x1 - B2 x2} (e^{A min(x1,x2)} - 1).
  if (A < kTaylorLimit) {
    ensure_moments();
    double sum = 0.0, power = 1.0;
    for (int n = 1; n <= kTaylorTerms; ++n) {
      power *= A / n;
      sum += power * moments_[n];
    }
    return sum;
  }
  if (std::min(b1_, b2_) >= 0.5) {
    auto half = [A](double a, double b) {
      return (damped_growth(A, a + b) - std::exp(-b) * damped_growth(A, a)) / b;
    };
    return half(b1_, b2_) + half(b2_, b1_);
  }
  const double b1 = b1_, b2 = b2_;
  return quad::integrate(
             [=](double t) {
               return std::expm1(A * t) *
                      (std::exp(-b1 * t) * tail_exp(b2, t) + std::exp(-b2 * t) * tail_exp(b1, t));
             },
             0.0, 1.0, m_->options_.single)
      .value;
}

void write_curve_csv(std::ostream& os, std::span<const double> lags, std::span<const double> values,
                     std::span<const std::string> header_lines) {
  if (lags.size() != values.size()) throw std::invalid_argument("lag and value columns differ in length");
  for (const auto& line : header_lines) os << "# " << line << '\n';
  os << "lag,value\n";
  char buf[64];
  for (std::size_t i = 0; i < lags.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", lags[i], values[i]);
    os << buf;
  }
}

}  // namespace hardcore
