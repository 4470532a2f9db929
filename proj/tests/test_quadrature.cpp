#include <doctest.h>

#include <cmath>

#include "heavytail/quadrature.hpp"
#include "heavytail/rng.hpp"

using namespace heavytail;

TEST_CASE("constant and polynomial integrands are exact") {
  CHECK(integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_adaptive([](double x) { return x; }, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate_adaptive([](double x) { return 3 * x * x - 2 * x + 1; }, -1.0, 2.0) ==
        doctest::Approx(9.0 - 3.0 + 3.0).epsilon(1e-13));
}

TEST_CASE("gaussian integral matches the reference value") {
  // int_{-8}^{8} e^{-x^2} dx = sqrt(pi) to well below 1e-10
  const double got = integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  CHECK(got == doctest::Approx(1.7724538509055160273).epsilon(1e-12));
}

TEST_CASE("oscillatory integrand converges under subdivision") {
  const double got = integrate_adaptive([](double x) { return std::cos(40.0 * x); }, 0.0, 1.0,
                                        QuadratureSpec{1e-12, 1e-10, 1000});
  CHECK(got == doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-10));
}

TEST_CASE("subdivision exhaustion raises a convergence error carrying the estimate") {
  // |x|^{-1/2} has an endpoint singularity the 2-interval budget cannot resolve
  auto f = [](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-300); };
  CHECK_THROWS_AS(integrate_adaptive(f, 0.0, 1.0, QuadratureSpec{1e-14, 1e-14, 2}),
                  convergence_error);
  try {
    integrate_adaptive(f, 0.0, 1.0, QuadratureSpec{1e-14, 1e-14, 2});
  } catch (const convergence_error& e) {
    CHECK(e.best_estimate() == doctest::Approx(2.0).epsilon(0.2));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("invalid inputs are rejected") {
  auto one = [](double) { return 1.0; };
  CHECK_THROWS_AS(integrate_adaptive(one, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_adaptive(one, 0.0, 1.0, QuadratureSpec{-1.0, 1e-8, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_adaptive(one, 0.0, 1.0, QuadratureSpec{1e-10, 1e-8, 0}),
                  std::invalid_argument);
}

TEST_CASE("linearity on random polynomials") {
  // int (a f + b g) = a int f + b int g within 10x the tolerance
  Xoshiro256pp gen(RngStream{991, 0});
  for (int trial = 0; trial < 25; ++trial) {
    double cf[4], cg[4];
    for (int i = 0; i < 4; ++i) {
      cf[i] = 4.0 * gen.uniform() - 2.0;
      cg[i] = 4.0 * gen.uniform() - 2.0;
    }
    const double a = 3.0 * gen.uniform() - 1.5;
    const double b = 3.0 * gen.uniform() - 1.5;
    auto poly = [](const double* c, double x) {
      return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
    };
    auto f = [&](double x) { return poly(cf, x); };
    auto g = [&](double x) { return poly(cg, x); };
    auto combo = [&](double x) { return a * f(x) + b * g(x); };
    const double lhs = integrate_adaptive(combo, -1.0, 3.0);
    const double rhs = a * integrate_adaptive(f, -1.0, 3.0) + b * integrate_adaptive(g, -1.0, 3.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("kronrod and gauss weights are internally consistent") {
  // both rules integrate 1 over [-1, 1] to exactly 2
  double wk = detail::kGk15WeightsK[7];
  double wg = detail::kGk15WeightsG[3];
  for (int i = 0; i < 7; ++i) wk += 2.0 * detail::kGk15WeightsK[i];
  for (int i = 0; i < 3; ++i) wg += 2.0 * detail::kGk15WeightsG[i];
  CHECK(wk == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(wg == doctest::Approx(2.0).epsilon(1e-14));
}
