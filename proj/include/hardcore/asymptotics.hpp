#pragma once

#include <string>
#include <string_view>

#include "hardcore/analytics.hpp"

namespace hardcore {

enum class Statistic { cover_covariance, two_point, radius_tail };

Statistic parse_statistic(std::string_view name);
std::string to_string(Statistic s);

/// Large-argument behavior of a statistic.
///   power_law:         amplitude * x^-exponent (an asymptotic equivalence)
///   exponential_bound: |value| <= amplitude * exp(-rate * x^power) for x >= valid_from
struct AsymptoticLaw {
  enum class Kind { power_law, exponential_bound, none };
  Kind kind = Kind::none;
  double amplitude = 0.0;
  double exponent = 0.0;
  double rate = 0.0;
  double power = 0.0;
  double valid_from = 0.0;
  std::string note;

  double evaluate(double x) const;
  bool has_prediction() const { return kind != Kind::none; }
};

/// Prediction for the thinned model's statistic; Kind::none with a note
/// when no result covers the kernel/statistic pair.
AsymptoticLaw asymptotic_prediction(const ThinnedModel& model, Statistic statistic);

/// Tail of the unthinned Boolean covariance, lambda (1-p)^2 c ell z^-(alpha-d).
AsymptoticLaw boolean_covariance_asymptote(const ThinnedModel& model);

/// Random kernel constants: k_th ~ c1 ell z^-(alpha-d), xi_th ~ c2 ell z^-(alpha-d).
struct RandomConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};
RandomConstants random_kernel_constants(const ThinnedModel& model);

/// Decay class of one entry of the long-range decay table.
struct DecayClass {
  enum class Kind { power, exponential, zero };
  Kind kind = Kind::zero;
  double exponent = 0.0;  ///< for Kind::power
  std::string describe() const;
};

/// Row `model` is "original" or a kernel name.
DecayClass decay_class(std::string_view model, Statistic statistic, double alpha, int d);

}  // namespace hardcore
