#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "heavytail/common.hpp"

namespace heavytail {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 400;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kGk15Nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kGk15WeightsK[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr double kGk15WeightsG[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct GkInterval {
  double a, b, value, error;
  bool operator<(const GkInterval& other) const { return error < other.error; }
};

template <typename F>
GkInterval gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kGk15WeightsK[7] * fc;
  double gauss = kGk15WeightsG[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double offset = half * kGk15Nodes[i];
    const double sum = f(center - offset) + f(center + offset);
    kronrod += kGk15WeightsK[i] * sum;
    if (i % 2 == 1) gauss += kGk15WeightsG[i / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return GkInterval{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]. Splits the interval
/// with the largest error estimate until the summed error drops below
/// max(abs_tol, rel_tol * |integral|). Throws convergence_error (carrying the
/// best estimate) if max_subdivisions is exhausted first.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: requires a < b");
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1) {
    throw std::invalid_argument("integrate_adaptive: invalid tolerance spec");
  }

  std::priority_queue<detail::GkInterval> intervals;
  intervals.push(detail::gk15(f, a, b));
  double total = intervals.top().value;
  double total_error = intervals.top().error;

  for (int n = 0; n < spec.max_subdivisions; ++n) {
    if (total_error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) return total;
    const detail::GkInterval worst = intervals.top();
    intervals.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    intervals.push(left);
    intervals.push(right);
  }
  if (total_error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) return total;
  throw convergence_error("integrate_adaptive: subdivision limit reached", total, total_error);
}

/// Non-template convenience overload.
double integrate_adaptive_fn(const std::function<double(double)>& f, double a, double b,
                             const QuadratureSpec& spec = {});

}  // namespace heavytail
