#include <doctest.h>

#include <cmath>

#include "heavytail/common.hpp"
#include "heavytail/nig.hpp"
#include "heavytail/quadrature.hpp"
#include "heavytail/returns.hpp"

using namespace heavytail;

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((NigParams{0.0, 0.0, 1.0, 0.0}.validate()), validation_error);
  CHECK_THROWS_AS((NigParams{1.0, 1.0, 1.0, 0.0}.validate()), validation_error);  // |beta| = alpha
  CHECK_THROWS_AS((NigParams{1.0, 0.0, 0.0, 0.0}.validate()), validation_error);
  CHECK_NOTHROW((NigParams{55.43, -0.299, 0.01254, -0.000541}.validate()));
}

TEST_CASE("density reference values") {
  // (1/pi) e K_1(1) at the standard symmetric point
  CHECK(nig_pdf(0.0, {1.0, 0.0, 1.0, 0.0}) == doctest::Approx(0.52080382999167005).epsilon(1e-10));
  CHECK(nig_pdf(1.0, {1.0, 0.0, 1.0, 0.0}) == doctest::Approx(0.19223501274440740).epsilon(1e-10));
  CHECK(nig_pdf(2.0, {2.0, 0.5, 1.5, 0.3}) == doctest::Approx(0.12254341790798215).epsilon(1e-10));
}

TEST_CASE("symmetry for beta = 0") {
  const NigParams p{1.0, 0.0, 1.0, 0.5};
  CHECK(nig_pdf(p.mu + 1.0, p) == doctest::Approx(nig_pdf(p.mu - 1.0, p)).epsilon(1e-12));
  CHECK(nig_cdf(p.mu, p) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("normalization across the parameter grid") {
  for (double alpha : {1.0, 5.0, 55.43}) {
    for (double beta_frac : {0.0, 0.3, -0.3}) {
      for (double delta : {0.01, 1.0}) {
        const NigParams p{alpha, beta_frac * alpha, delta, 0.0};
        const double sd = std::sqrt(p.variance());
        auto dens = [&](double x) { return nig_pdf(x, p); };
        const double mass = integrate_adaptive(dens, p.mean() - 40.0 * sd, p.mean() + 40.0 * sd,
                                               QuadratureSpec{1e-10, 1e-8, 4000});
        CHECK_MESSAGE(mass == doctest::Approx(1.0).epsilon(1e-6), "alpha=", alpha,
                      " beta=", beta_frac * alpha, " delta=", delta);
      }
    }
  }
}

TEST_CASE("log-space evaluation agrees with the linear value") {
  const NigParams p{55.43, -0.299, 0.01254, -0.000541};
  for (double x : {-0.2, -0.01, 0.0, 0.03, 0.4}) {
    const double lin = nig_pdf(x, p);
    if (lin > 1e-280) {
      CHECK(nig_log_pdf(x, p) == doctest::Approx(std::log(lin)).epsilon(1e-9));
    } else {
      CHECK(std::isfinite(nig_log_pdf(x, p)));
    }
  }
  CHECK(std::isfinite(nig_log_pdf(50.0, {1.0, 0.0, 1.0, 0.0})));  // far tail stays in log space
}

TEST_CASE("cdf: frozen oracle values, limits, monotonicity") {
  CHECK(nig_cdf(1.0, {1.0, 0.0, 1.0, 0.0}) == doctest::Approx(0.87596522110053151).epsilon(1e-7));
  CHECK(nig_cdf(0.5, {2.0, 0.5, 1.5, 0.3}) == doctest::Approx(0.43379547243745282).epsilon(1e-7));
  const NigParams p{1.5, -0.5, 2.0, 0.0};
  CHECK(nig_cdf(-1e5, p) == doctest::Approx(0.0));
  CHECK(nig_cdf(1e5, p) == doctest::Approx(1.0));
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.5) {
    const double f = nig_cdf(x, p);
    CHECK(f >= prev - 1e-12);
    prev = f;
  }
}

TEST_CASE("cdf against an independent fine-grid trapezoid oracle") {
  const NigParams p{1.0, 0.0, 1.0, 0.0};
  const double lo = -60.0;
  const double x = 1.0;
  const std::size_t steps = 400000;
  const double h = (x - lo) / steps;
  double acc = 0.5 * (nig_pdf(lo, p) + nig_pdf(x, p));
  for (std::size_t i = 1; i < steps; ++i) acc += nig_pdf(lo + h * i, p);
  acc *= h;
  CHECK(nig_cdf(x, p) == doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("grid evaluator matches the direct cdf") {
  const NigParams p{55.43, -0.299, 0.01254, -0.000541};
  const NigGrid grid(p);
  for (double x : {-0.08, -0.02, 0.0, 0.011, 0.05, 0.2}) {
    CHECK_MESSAGE(std::abs(grid.cdf(x) - nig_cdf(x, p)) < 1e-6, "x=", x);
  }
}

TEST_CASE("sampling: determinism, moments, KS") {
  const NigParams p{2.0, 0.6, 1.5, -0.3};
  const RngStream stream{77, 1};
  CHECK(nig_sample(500, p, stream) == nig_sample(500, p, stream));

  // analytic mean/variance validated against numerical moment integrals first
  const double mean_int = integrate_adaptive([&](double x) { return x * nig_pdf(x, p); }, -80.0,
                                             80.0, QuadratureSpec{1e-10, 1e-8, 4000});
  CHECK(p.mean() == doctest::Approx(mean_int).epsilon(1e-7));
  const double var_int =
      integrate_adaptive([&](double x) { return (x - mean_int) * (x - mean_int) * nig_pdf(x, p); },
                         -80.0, 80.0, QuadratureSpec{1e-10, 1e-8, 4000});
  CHECK(p.variance() == doctest::Approx(var_int).epsilon(1e-6));

  const std::size_t n = 1000000;
  const auto x = nig_sample(n, p, stream);
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  const double se = std::sqrt(p.variance() / static_cast<double>(n));
  CHECK(std::abs(mean - p.mean()) < 3.0 * se);

  // KS at the 1% level against the grid cdf
  const NigGrid grid(p);
  std::vector<double> sub(x.begin(), x.begin() + 100000);
  std::sort(sub.begin(), sub.end());
  double d = 0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const double f = grid.cdf(sub[i]);
    d = std::max(d, std::max(std::abs(f - static_cast<double>(i) / sub.size()),
                             std::abs(static_cast<double>(i + 1) / sub.size() - f)));
  }
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(sub.size())));
}

TEST_CASE("moment initializer: exact affine equivariance") {
  const auto x = nig_sample(5000, {55.43, -0.299, 0.01254, -0.000541}, RngStream{78, 0});
  const NigParams base = nig_fit_moments(x);
  const double a = 3.0, b = -0.25;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
  const NigParams mapped = nig_fit_moments(y);
  CHECK(mapped.alpha == doctest::Approx(base.alpha / a).epsilon(1e-9));
  CHECK(mapped.beta == doctest::Approx(base.beta / a).epsilon(1e-9));
  CHECK(mapped.delta == doctest::Approx(base.delta * a).epsilon(1e-9));
  CHECK(mapped.mu == doctest::Approx(a * base.mu + b).epsilon(1e-9));
}

TEST_CASE("mle: delta recovery at the published NIG fit") {
  const NigParams truth{55.43, -0.2990, 0.01254, -0.000541};
  int inside = 0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const auto x = nig_sample(10000, truth, RngStream{79, static_cast<std::uint64_t>(s)});
    const NigFitResult r = nig_fit_mle(std::span<const double>{x});
    if (std::abs(r.params.delta - truth.delta) <= 0.1 * truth.delta) ++inside;
  }
  CHECK(inside >= 9);
}

TEST_CASE("near-gaussian data: fitted NIG density approaches the fitted gaussian") {
  // NIG -> N(mu, sigma^2) as alpha grows with delta/alpha -> sigma^2
  std::vector<double> x = draw_normal(RngStream{80, 0}, 100000);
  for (auto& v : x) v = 0.5 + 0.1 * v;
  const NigFitResult r = nig_fit_mle(std::span<const double>{x});
  const GaussianFit g = gaussian_fit(std::span<const double>{x});
  double sup = 0.0;
  for (double u = 0.0; u <= 1.0; u += 0.01) {
    const double gauss =
        std::exp(-0.5 * (u - g.mu) * (u - g.mu) / (g.sigma * g.sigma)) /
        (g.sigma * std::sqrt(2.0 * 3.14159265358979324));
    sup = std::max(sup, std::abs(nig_pdf(u, r.params) - gauss));
  }
  CHECK(sup < 1e-3 * (1.0 / (0.1 * std::sqrt(2 * 3.14159265358979324))) + 0.05);
}

TEST_CASE("mle rejects short series") {
  const std::vector<double> tiny(50, 0.1);
  CHECK_THROWS_AS(nig_fit_mle(std::span<const double>{tiny}), validation_error);
}
