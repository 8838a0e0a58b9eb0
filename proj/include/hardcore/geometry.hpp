#pragma once

#include <span>

namespace hardcore {

/// Highest dimension accepted by the pure volume formulas.
inline constexpr int kMaxVolumeDimension = 8;
/// Highest dimension supported by the simulator and estimators.
inline constexpr int kMaxSimulationDimension = 3;

/// Throws std::invalid_argument unless 1 <= d <= max_dimension.
void require_dimension(int d, int max_dimension = kMaxVolumeDimension);

/// Two balls B_{r1}(o) and B_{r2}(u e1).
struct LensSpec {
  double r1 = 0.0;
  double r2 = 0.0;
  double u = 0.0;
};

/// Volume of the closed unit ball in R^d, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);

double ball_volume(int d, double r);

/// Surface measure of the sphere of radius r in R^d (2 for d = 1).
double sphere_area(int d, double r);

/// Volume of the part of B_r cut off by a hyperplane at signed distance
/// `offset` from the center (the side not containing the center when
/// offset > 0). Offsets outside [-r, r] are clamped.
double cap_volume(int d, double r, double offset);

/// Exact volume |B_{r1}(o) ∩ B_{r2}(u e1)|. Uses closed forms for d = 1, 2
/// and the incomplete-beta cap formula otherwise.
double ball_intersection_volume(int d, const LensSpec& spec);

/// Same quantity always evaluated through the incomplete-beta cap formula.
double ball_intersection_volume_beta(int d, const LensSpec& spec);

/// Volume of the Minkowski sum of an axis-aligned box with the given side
/// lengths and a ball of radius r (Steiner formula).
double box_dilation_volume(std::span<const double> sides, double r);

/// Steiner coefficients: box_dilation_volume(sides, r) = sum_k coeff[k] r^k.
/// Returns d + 1 coefficients.
void box_dilation_coefficients(std::span<const double> sides, std::span<double> out);

}  // namespace hardcore
