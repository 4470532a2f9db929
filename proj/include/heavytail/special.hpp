#pragma once

namespace heavytail {

/// Regularized lower incomplete gamma P(a, x); series/continued-fraction split at x = a+1.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution, P(Chi2_dof > x).
/// Monotone decreasing in x; chi_square_sf(0, k) = 1. Throws std::domain_error
/// for dof < 1 or x < 0.
double chi_square_sf(double x, int dof);

/// CDF counterpart; chi_square_sf + chi_square_cdf = 1.
double chi_square_cdf(double x, int dof);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal quantile (inverse CDF), p in (0, 1).
double normal_quantile(double p);

}  // namespace heavytail
