#pragma once

namespace heavytail {

/// Modified Bessel function of the second kind, K_0(x) or K_1(x).
/// Power series for x <= 2, Thompson-Barnett continued fraction beyond;
/// relative error below 1e-12 across x in [1e-6, 700].
/// Throws std::domain_error for x <= 0 and std::overflow_error when the
/// result exceeds the double range (K_1 near x = 0).
double bessel_k(int order, double x);

/// e^x K_nu(x); stays representable for arbitrarily large x.
double bessel_k_scaled(int order, double x);

/// log K_nu(x), evaluated without intermediate under/overflow.
double log_bessel_k(int order, double x);

}  // namespace heavytail
