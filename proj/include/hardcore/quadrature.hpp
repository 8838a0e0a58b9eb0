#pragma once

// Globally adaptive Gauss-Kronrod (10/21 point) integration on finite
// intervals with caller-supplied breakpoints. Semi-infinite integrals
// against a radius law are mapped onto finite intervals in radius_law.hpp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace hardcore::quad {

struct Tolerance {
  double abs = 1e-14;
  double rel = 1e-9;
  int max_intervals = 400;

  Tolerance tightened(double factor) const {
    return {abs * factor, rel * factor, max_intervals};
  }
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = true;

  Result& operator+=(const Result& other) {
    value += other.value;
    error += other.error;
    intervals += other.intervals;
    converged = converged && other.converged;
    return *this;
  }
};

namespace detail {

inline constexpr double kronrod_nodes[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr double kronrod_weights[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208416624601, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes.
inline constexpr double gauss_weights[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

// Error estimate follows QUADPACK's qk21 scaling.
template <class F>
Piece kronrod21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kronrod_nodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    kronrod += kronrod_weights[j] * (f1 + f2);
    abs_sum += kronrod_weights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kronrod;
  double asc = kronrod_weights[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    asc += kronrod_weights[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double scale = std::abs(half);
  const double value = kronrod * half;
  const double resabs = abs_sum * scale;
  const double resasc = asc * scale;
  double error = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && error != 0.0)
    error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (resabs > tiny / (50.0 * eps)) error = std::max(50.0 * eps * resabs, error);
  if (!std::isfinite(value)) error = std::numeric_limits<double>::infinity();
  return {a, b, value, error};
}

}  // namespace detail

// Integrates f over [a, b]. Breakpoints strictly inside (a, b) split the
// initial partition so kinks and jumps land on interval ends.
template <class F>
Result integrate(F&& f, double a, double b, std::span<const double> breakpoints,
                 const Tolerance& tol = {}) {
  Result result;
  if (!(b > a)) return result;

  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (std::isfinite(p) && p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Piece> heap;
  double total = 0.0, total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    auto piece = detail::kronrod21(f, cuts[i], cuts[i + 1]);
    total += piece.value;
    total_error += piece.error;
    heap.push(piece);
  }

  int intervals = static_cast<int>(heap.size());
  const int limit = std::max(tol.max_intervals, intervals + 1);
  while (total_error > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (intervals >= limit || heap.empty()) {
      result.converged = false;
      break;
    }
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in floating point.
      result.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::kronrod21(f, worst.a, mid);
    auto right = detail::kronrod21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  // Re-sum to shed drift from the running updates.
  total = 0.0;
  total_error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_error += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.error = total_error;
  result.intervals = intervals;
  if (!std::isfinite(total)) result.converged = false;
  return result;
}

template <class F>
Result integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
  return integrate(std::forward<F>(f), a, b, std::span<const double>{}, tol);
}

}  // namespace hardcore::quad
