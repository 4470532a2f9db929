#include "heavytail/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace heavytail {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;

struct K01 {
  double k0, k1;  // both scaled by e^x when from the continued fraction
};

// Power series around x = 0 (DLMF 10.31): accurate for x <= 2.
//   K0 = -(ln(x/2) + g) I0 + sum_{k>=1} q^k/(k!)^2 H_k
//   K1 = 1/x + (ln(x/2) + g) I1 - (x/4) sum_{k>=0} (H_k + H_{k+1}) q^k/(k!(k+1)!)
K01 bessel_k01_series(double x) {
  const double q = 0.25 * x * x;
  const double lg = std::log(0.5 * x) + kEulerGamma;

  double i0 = 1.0, i1 = 0.5;           // I1/x accumulated; multiply by x at the end
  double s0 = 0.0, s1_h = 0.5;         // sum for K0; (H_k+H_{k+1}) sum for K1 (k = 0 term: H_0+H_1 = 1)
  double term0 = 1.0, term1 = 0.5, harmonic = 0.0;
  for (int k = 1; k < 40; ++k) {
    term0 *= q / (static_cast<double>(k) * k);
    term1 *= q / (static_cast<double>(k) * (k + 1));
    harmonic += 1.0 / k;
    i0 += term0;
    i1 += term1;
    s0 += term0 * harmonic;
    s1_h += term1 * (2.0 * harmonic + 1.0 / (k + 1));
    if (term0 < 1e-18 * i0 && k > 4) break;
  }
  const double k0 = -lg * i0 + s0;
  // term1/s1_h carry a 1/2 from the I1 series, so the (x/4) prefactor becomes x/2
  const double k1 = 1.0 / x + lg * (i1 * x) - 0.5 * x * s1_h;
  return {k0, k1};
}

// Thompson-Barnett CF2 at order mu = 0, for x > 2. Returns e^x-scaled values.
K01 bessel_k01_cf_scaled(double x) {
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 200;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) <= kEps) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

void check_args(int order, double x) {
  if (order != 0 && order != 1) {
    throw std::invalid_argument("bessel_k: order must be 0 or 1, got " + std::to_string(order));
  }
  if (!(x > 0.0)) throw std::domain_error("bessel_k: requires x > 0");
}

}  // namespace

double bessel_k(int order, double x) {
  check_args(order, x);
  if (order == 1 && x < 1e-305) {
    throw std::overflow_error("bessel_k: K_1(x) overflows for x < 1e-305");
  }
  if (x <= 2.0) {
    const K01 v = bessel_k01_series(x);
    return order == 0 ? v.k0 : v.k1;
  }
  const K01 v = bessel_k01_cf_scaled(x);
  const double scale = std::exp(-x);  // underflows to 0 beyond x ~ 745; K is genuinely subnormal there
  return (order == 0 ? v.k0 : v.k1) * scale;
}

double bessel_k_scaled(int order, double x) {
  check_args(order, x);
  if (x <= 2.0) {
    const K01 v = bessel_k01_series(x);
    return (order == 0 ? v.k0 : v.k1) * std::exp(x);
  }
  const K01 v = bessel_k01_cf_scaled(x);
  return order == 0 ? v.k0 : v.k1;
}

double log_bessel_k(int order, double x) {
  check_args(order, x);
  if (x <= 2.0) {
    const K01 v = bessel_k01_series(x);
    return std::log(order == 0 ? v.k0 : v.k1);
  }
  const K01 v = bessel_k01_cf_scaled(x);
  return std::log(order == 0 ? v.k0 : v.k1) - x;
}

}  // namespace heavytail
