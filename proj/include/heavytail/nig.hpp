#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "heavytail/returns.hpp"
#include "heavytail/rng.hpp"

namespace heavytail {

/// Normal-inverse Gaussian law,
///   f(x) = (alpha delta / pi) e^{delta g + beta (x-mu)} K_1(alpha s) / s,
/// with g = sqrt(alpha^2 - beta^2), s = sqrt(delta^2 + (x-mu)^2). The K_{-1}
/// in the usual writing equals K_1 (modified Bessel K is even in its order).
struct NigParams {
  double alpha = 1.0;  // steepness, > 0, inverse data units
  double beta = 0.0;   // asymmetry, |beta| < alpha
  double delta = 1.0;  // scale, > 0, data units
  double mu = 0.0;     // location

  void validate() const;
  double steepness_margin() const;  // sqrt(alpha^2 - beta^2)
  double mean() const;              // mu + delta beta / g
  double variance() const;          // delta alpha^2 / g^3
};

struct NigFitResult {
  NigParams params;
  double log_likelihood = 0.0;
  bool converged = false;
};

double nig_pdf(double x, const NigParams& p);
double nig_log_pdf(double x, const NigParams& p);  // evaluated in log space throughout

/// CDF by adaptive integration of the density from the relevant tail.
double nig_cdf(double x, const NigParams& p);

/// Normal variance-mean mixture draws: inverse-Gaussian mixing variate
/// (Michael-Schucany-Haas) plus a Gaussian, deterministic given the stream.
std::vector<double> nig_sample(std::size_t n, const NigParams& p, const RngStream& stream);

/// Method-of-moments initializer (clamped into the validity region).
NigParams nig_fit_moments(std::span<const double> data);

/// Maximum likelihood via Nelder-Mead from the moment initializer.
NigFitResult nig_fit_mle(std::span<const double> data);
NigFitResult nig_fit_mle(const ReturnSeries& data);

/// Grid-backed cdf evaluator for goodness-of-fit loops.
class NigGrid {
 public:
  explicit NigGrid(const NigParams& p);
  ~NigGrid();
  NigGrid(NigGrid&&) noexcept;
  NigGrid& operator=(NigGrid&&) noexcept;

  double pdf(double x) const;
  double cdf(double x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace heavytail
