#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hardcore/kernels.hpp"
#include "hardcore/quadrature.hpp"
#include "hardcore/radius_law.hpp"

namespace hardcore {

struct ModelSpec {
  double lambda = 0.05;
  RadiusLaw law = RadiusLaw::pareto(2.5, 1.0);
  WeightKernel kernel = WeightKernel::isolated;
  int d = 2;

  /// Throws std::invalid_argument / std::domain_error on a bad model,
  /// including an infinite d-th radius moment.
  void validate() const;
};

struct AnalyticsOptions {
  /// Single integrals against F.
  quad::Tolerance single{1e-300, 1e-9, 400};
  /// Outer levels of the nested integrals for q, k_th and xi_th.
  quad::Tolerance nested{1e-300, 1e-6, 200};
  /// Innermost geometric levels of k_th in d = 2 and tau in d >= 2.
  quad::Tolerance inner{1e-300, 1e-6, 100};
};

/// c_{alpha,d} = int |B_r(o) ∩ B_r(e1)| alpha r^{-alpha-1} dr; alpha > d.
double c_alpha_d(double alpha, int d);

/// Obstructing grains of a grain with weight w, written as
/// G_s[w, inf) = factor * 1{s in range}.
struct Obstructors {
  double factor = 0.0;
  RadiusRange range = RadiusRange::none();
};
Obstructors obstructors(WeightKernel kernel, double w);

/// Closed-form and quadrature statistics of one model. Scalars used by
/// several statistics are computed once at construction.
class ThinnedModel {
 public:
  explicit ThinnedModel(ModelSpec spec, AnalyticsOptions options = {});

  const ModelSpec& spec() const { return spec_; }
  const AnalyticsOptions& options() const { return options_; }
  int dimension() const { return spec_.d; }
  double lambda() const { return spec_.lambda; }

  /// p = 1 - exp(-lambda E|B_R|).
  double boolean_volume_fraction() const { return p_; }
  /// k(z) of the unthinned Boolean cover.
  double boolean_covariance(double z) const;

  /// int_S |B_{r+s}| F(ds) for an obstructor range S.
  double obstruction_volume(double r, const RadiusRange& range) const;
  /// h(r, w).
  double retention_probability(double r, double w) const;
  /// h(r), averaged over the kernel's weight law.
  double mean_retention(double r) const;

  double thinned_intensity() const { return lambda_th_; }
  /// Fbar_th(r) = (lambda / lambda_th) int_(r, inf) h dF.
  double thinned_radius_tail(double r) const;
  double thinned_volume_fraction() const { return p_th_; }

  /// tau(u, r1, r2, w): lambda int |B_{s+r1}(o) ∩ B_{s+r2}(u e1)| G_s[w, inf) F(ds)
  /// for u > r1 + r2.
  double tau(double u, double r1, double r2, double w) const;
  /// h2 for two grains at distance u with the given radii and weights.
  double pair_retention(double u, double r1, double w1, double r2, double w2) const;
  /// q(u, r1, r2) = h2(u, r1, r2) - h(r1) h(r2).
  double retention_covariance(double u, double r1, double r2) const;

  /// k_th(z); d = 1 or 2 only (std::domain_error otherwise).
  double thinned_covariance(double z) const;
  /// xi_th(z) = g_th(z) - 1 of the retained germs.
  double thinned_two_point_correlation(double z) const;

  /// c_{alpha,d} for the model's Pareto exponent.
  double c_alpha_d() const;

  /// Average intersection int |B_{s+r1}(o) ∩ B_{s+r2}(u e1)| F(ds) over s in range.
  double average_intersection(double u, double r1, double r2,
                              const RadiusRange& range = RadiusRange::all()) const;

  /// Weight-averaged pair quantities with r1, r2 fixed; the nested
  /// integrals evaluate many u at one radius pair.
  class Pair {
   public:
    Pair(const ThinnedModel& model, double r1, double r2);
    double h1() const { return h1_; }
    double h2() const { return h2_; }
    /// q(u, r1, r2).
    double q(double u) const;
    /// int_0^1 int_0^1 min(x1, x2) exp(-B1 x1 - B2 x2) dx1 dx2 (random kernel).
    double random_q_slope() const;

   private:
    double random_q(double A) const;
    void ensure_moments() const;

    const ThinnedModel* m_;
    double r1_, r2_, h1_, h2_;
    double factor_ = 0.0;
    RadiusRange range_;
    double b1_ = 0.0, b2_ = 0.0;  // lambda b(r_i), random kernel
    mutable bool have_moments_ = false;
    mutable double moments_[9] = {};
  };

 private:
  ModelSpec spec_;
  AnalyticsOptions options_;
  double kappa_ = 0.0;
  double p_ = 0.0;
  double lambda_th_ = 0.0;
  double p_th_ = 0.0;
};

/// int_0^1 t^n exp(-c t) dt for c >= 0.
double power_exp_moment(int n, double c);

/// `lag,value` rows preceded by '#' comment lines.
void write_curve_csv(std::ostream& os, std::span<const double> lags, std::span<const double> values,
                     std::span<const std::string> header_lines = {});

}  // namespace hardcore
