#include "heavytail/nig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "heavytail/bessel.hpp"
#include "heavytail/common.hpp"
#include "heavytail/optimize.hpp"
#include "heavytail/quadrature.hpp"

namespace heavytail {

namespace {
constexpr double kPi = std::numbers::pi;
}

void NigParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw validation_error("nig params: alpha must be positive");
  if (!(std::abs(beta) < alpha)) throw validation_error("nig params: requires |beta| < alpha");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw validation_error("nig params: delta must be positive");
  if (!std::isfinite(mu)) throw validation_error("nig params: mu must be finite");
}

double NigParams::steepness_margin() const { return std::sqrt((alpha - beta) * (alpha + beta)); }
double NigParams::mean() const { return mu + delta * beta / steepness_margin(); }
double NigParams::variance() const {
  const double g = steepness_margin();
  return delta * alpha * alpha / (g * g * g);
}

double nig_log_pdf(double x, const NigParams& p) {
  const double d = x - p.mu;
  const double s = std::sqrt(p.delta * p.delta + d * d);
  const double g = p.steepness_margin();
  return std::log(p.alpha * p.delta / kPi) + p.delta * g + p.beta * d +
         log_bessel_k(1, p.alpha * s) - std::log(s);
}

double nig_pdf(double x, const NigParams& p) {
  p.validate();
  return std::exp(nig_log_pdf(x, p));
}

namespace {

// |x - mu| beyond which the log density has dropped ~60+ nats below the peak
double tail_extent(const NigParams& p, bool left) {
  const double rate = left ? (p.alpha + p.beta) : (p.alpha - p.beta);
  return (60.0 + p.delta * p.steepness_margin()) / rate + 10.0 * p.delta;
}

}  // namespace

double nig_cdf(double x, const NigParams& p) {
  p.validate();
  const QuadratureSpec spec{1e-11, 1e-9, 2000};
  auto f = [&](double u) { return std::exp(nig_log_pdf(u, p)); };
  if (x <= p.mu) {
    const double lo = p.mu - tail_extent(p, /*left=*/true);
    if (x <= lo) return 0.0;
    return std::clamp(integrate_adaptive(f, lo, x, spec), 0.0, 1.0);
  }
  const double hi = p.mu + tail_extent(p, /*left=*/false);
  if (x >= hi) return 1.0;
  return std::clamp(1.0 - integrate_adaptive(f, x, hi, spec), 0.0, 1.0);
}

std::vector<double> nig_sample(std::size_t n, const NigParams& p, const RngStream& stream) {
  p.validate();
  if (n == 0) throw std::invalid_argument("nig_sample: n must be >= 1");
  Xoshiro256pp gen(stream);
  std::vector<double> out(n);
  const double g = p.steepness_margin();
  const double m = p.delta / g;            // inverse-Gaussian mean
  const double lambda = p.delta * p.delta;  // inverse-Gaussian shape
  for (auto& v : out) {
    // Michael-Schucany-Haas inverse-Gaussian variate; fixed draw order keeps
    // the sequence reproducible (normal, uniform, normal per output value)
    const double nu = gen.normal();
    const double y = nu * nu;
    const double c = m / (2.0 * lambda);
    double ig = m + c * m * y - c * std::sqrt(4.0 * m * lambda * y + m * m * y * y);
    if (ig <= 0.0) ig = std::numeric_limits<double>::min();
    const double u = gen.uniform();
    const double mix = (u <= m / (m + ig)) ? ig : m * m / ig;
    v = p.mu + p.beta * mix + std::sqrt(mix) * gen.normal();
  }
  return out;
}

NigParams nig_fit_moments(std::span<const double> data) {
  const SummaryStats stats = summary_stats(data);
  const double v = stats.std_dev * stats.std_dev;
  const double s = stats.skewness;
  double excess = stats.kurtosis - 3.0;
  // validity of the moment inversion needs excess > (5/3) skew^2
  const double floor_excess = (5.0 / 3.0) * s * s + 0.05;
  if (excess < floor_excess) excess = floor_excess;

  const double t = 3.0 / (excess - (4.0 / 3.0) * s * s);  // t = delta * g
  double r = s * std::sqrt(t) / 3.0;                      // r = beta / alpha
  r = std::clamp(r, -0.95, 0.95);
  const double g = std::sqrt(t / (v * (1.0 - r * r)));
  const double delta = t / g;
  const double alpha = g / std::sqrt(1.0 - r * r);
  const double beta = r * alpha;
  const double mu = stats.mean - delta * beta / g;
  NigParams p{alpha, beta, delta, mu};
  p.validate();
  return p;
}

NigFitResult nig_fit_mle(std::span<const double> data) {
  if (data.size() < 100) throw validation_error("nig MLE: need at least 100 observations");
  const NigParams init = nig_fit_moments(data);
  const double alpha0 = init.alpha;
  const double delta0 = init.delta;
  const double mu0 = init.mu;
  const double b0 = std::clamp(init.beta / init.alpha, -0.9, 0.9);

  auto decode = [&](const std::vector<double>& th) {
    NigParams p;
    p.alpha = alpha0 * std::exp(th[0]);
    p.beta = p.alpha * std::tanh(th[1]);
    p.delta = delta0 * std::exp(th[2]);
    p.mu = mu0 + th[3] * delta0;
    return p;
  };
  auto objective = [&](const std::vector<double>& th) {
    const NigParams p = decode(th);
    double total = 0.0;
    for (double x : data) total += nig_log_pdf(x, p);
    return std::isfinite(total) ? -total : std::numeric_limits<double>::infinity();
  };

  std::vector<double> theta{0.0, std::atanh(b0), 0.0, 0.0};
  NelderMeadOptions opts;
  opts.tol = 1e-7;
  opts.max_iter = 2000;
  opts.initial_step = 0.25;
  NelderMeadResult best = nelder_mead_minimize(objective, theta, opts);
  for (int restart = 0; restart < 2 && !best.converged; ++restart) {
    opts.initial_step = 0.05;
    NelderMeadResult again = nelder_mead_minimize(objective, best.x, opts);
    if (again.fx <= best.fx) best = again;
  }

  NigFitResult result;
  result.params = decode(best.x);
  result.log_likelihood = -best.fx;
  result.converged = best.converged;
  return result;
}

NigFitResult nig_fit_mle(const ReturnSeries& data) { return nig_fit_mle(std::span{data.values}); }

// ---------------------------------------------------------------------------
// Grid evaluator
// ---------------------------------------------------------------------------

struct NigGrid::Impl {
  NigParams p;
  double x_lo, x_hi, h;
  std::vector<double> pdf_vals;
  std::vector<double> cdf_vals;
  static constexpr std::size_t kN = 8192;

  explicit Impl(const NigParams& params) : p(params) {
    x_lo = p.mu - tail_extent(p, true);
    x_hi = p.mu + tail_extent(p, false);
    h = (x_hi - x_lo) / static_cast<double>(kN - 1);
    pdf_vals.resize(kN);
    for (std::size_t i = 0; i < kN; ++i) {
      pdf_vals[i] = std::exp(nig_log_pdf(x_lo + h * static_cast<double>(i), p));
    }
    cdf_vals.assign(kN, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < kN; ++i) {
      const double d0 = slope(i), d1 = slope(i + 1);
      acc += 0.5 * h * (pdf_vals[i] + pdf_vals[i + 1]) + h * h / 12.0 * (d0 - d1);
      cdf_vals[i + 1] = acc;
    }
    // the grid spans the support to ~e^{-60}; normalize out the truncated sliver
    if (acc > 0.0) {
      for (auto& c : cdf_vals) c /= acc;
    }
  }

  double slope(std::size_t i) const {
    if (i == 0 || i + 1 >= kN) return 0.0;
    return (pdf_vals[i + 1] - pdf_vals[i - 1]) / (2.0 * h);
  }

  double cdf(double x) const {
    if (x <= x_lo) return 0.0;
    if (x >= x_hi) return 1.0;
    const double pos = (x - x_lo) / h;
    const std::size_t j = std::min(static_cast<std::size_t>(pos), kN - 2);
    const double u = pos - static_cast<double>(j);
    const double F0 = cdf_vals[j], F1 = cdf_vals[j + 1];
    const double d0 = pdf_vals[j] * h, d1 = pdf_vals[j + 1] * h;
    const double u2 = u * u, u3 = u2 * u;
    double val = (2 * u3 - 3 * u2 + 1) * F0 + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * F1 +
                 (u3 - u2) * d1;
    return std::clamp(val, 0.0, 1.0);
  }

  double pdf(double x) const {
    if (x <= x_lo || x >= x_hi) return std::exp(nig_log_pdf(x, p));
    const double pos = (x - x_lo) / h;
    const std::size_t j = std::min(static_cast<std::size_t>(pos), kN - 2);
    const double u = pos - static_cast<double>(j);
    return std::max((1.0 - u) * pdf_vals[j] + u * pdf_vals[j + 1], 0.0);
  }
};

NigGrid::NigGrid(const NigParams& p) {
  p.validate();
  impl_ = std::make_unique<Impl>(p);
}
NigGrid::~NigGrid() = default;
NigGrid::NigGrid(NigGrid&&) noexcept = default;
NigGrid& NigGrid::operator=(NigGrid&&) noexcept = default;

double NigGrid::pdf(double x) const { return impl_->pdf(x); }
double NigGrid::cdf(double x) const { return impl_->cdf(x); }

}  // namespace heavytail
