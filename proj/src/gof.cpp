#include "heavytail/gof.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>

#include "heavytail/common.hpp"
#include "heavytail/nig.hpp"
#include "heavytail/parallel.hpp"
#include "heavytail/special.hpp"
#include "heavytail/stable.hpp"

namespace heavytail {

double ks_statistic(std::span<const double> sorted_data, const std::function<double(double)>& cdf) {
  const std::size_t n = sorted_data.size();
  if (n == 0) throw std::invalid_argument("ks_statistic: empty sample");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && sorted_data[i] < sorted_data[i - 1]) {
      throw std::invalid_argument("ks_statistic: data not sorted ascending");
    }
    const double f = cdf(sorted_data[i]);
    const double lower = std::abs(f - static_cast<double>(i) / n);
    const double upper = std::abs(static_cast<double>(i + 1) / n - f);
    d = std::max(d, std::max(lower, upper));
  }
  return d;
}

ChiSquareResult pearson_chi_square(std::span<const double> data,
                                   const std::function<double(double)>& cdf,
                                   int n_params_estimated, int bins_override) {
  const std::size_t n = data.size();
  if (n < 50) throw validation_error("pearson_chi_square: need at least 50 observations");

  int bins;
  if (bins_override > 0) {
    bins = bins_override;
  } else {
    bins = static_cast<int>(std::lround(2.0 * std::pow(static_cast<double>(n), 0.4)));
    bins = std::min<int>(bins, static_cast<int>(n / 5));  // expected counts >= 5
  }
  if (bins < n_params_estimated + 2) {
    throw validation_error("pearson_chi_square: cannot form enough bins");
  }

  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double x : data) {
    const double u = std::clamp(cdf(x), 0.0, 1.0);
    auto idx = static_cast<std::size_t>(u * bins);
    if (idx >= counts.size()) idx = counts.size() - 1;
    counts[idx] += 1.0;
  }
  const double expected = static_cast<double>(n) / bins;
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;

  ChiSquareResult r;
  r.stat = stat;
  r.dof = bins - 1 - n_params_estimated;
  r.bins = bins;
  r.p_value = chi_square_sf(stat, r.dof);
  return r;
}

namespace {

double log_normal_cdf(double z) {
  if (z < -37.0) {
    // asymptotic left tail: Phi(z) ~ phi(z)/(-z)
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  if (z > 8.0) return std::log1p(-normal_cdf(-z));
  return std::log(normal_cdf(z));
}

}  // namespace

AndersonDarlingResult anderson_darling_normal(std::span<const double> data, double mu, double sigma) {
  const std::size_t n = data.size();
  if (n < 8) throw validation_error("anderson_darling_normal: need at least 8 observations");
  if (!(sigma > 0.0)) throw validation_error("anderson_darling_normal: sigma must be positive");

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (data[i] - mu) / sigma;
  std::sort(z.begin(), z.end());

  double a2 = -static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = static_cast<double>(2 * (i + 1) - 1) / n;
    a2 -= w * (log_normal_cdf(z[i]) + log_normal_cdf(-z[n - 1 - i]));
  }
  // estimated-parameter (case 3) small-sample adjustment and p approximation
  const double nn = static_cast<double>(n);
  const double a2_star = a2 * (1.0 + 0.75 / nn + 2.25 / (nn * nn));
  double p;
  if (a2_star >= 0.6) {
    p = std::exp(1.2937 - 5.709 * a2_star + 0.0186 * a2_star * a2_star);
  } else if (a2_star > 0.34) {
    p = std::exp(0.9177 - 4.279 * a2_star - 1.38 * a2_star * a2_star);
  } else if (a2_star > 0.2) {
    p = 1.0 - std::exp(-8.318 + 42.796 * a2_star - 59.938 * a2_star * a2_star);
  } else {
    p = 1.0 - std::exp(-13.436 + 101.14 * a2_star - 223.73 * a2_star * a2_star);
  }
  return {a2_star, std::clamp(p, 0.0, 1.0)};
}

// ---------------------------------------------------------------------------
// Model adapters
// ---------------------------------------------------------------------------

ModelAdapter gaussian_adapter() {
  ModelAdapter m;
  m.name = "gaussian";
  m.n_params = 2;
  m.fit = [](std::span<const double> data) {
    const GaussianFit f = gaussian_fit(data);
    return std::vector<double>{f.mu, f.sigma};
  };
  m.fit_fast = m.fit;
  m.make_cdf = [](const std::vector<double>& p) {
    const double mu = p[0], sigma = p[1];
    return [mu, sigma](double x) { return normal_cdf((x - mu) / sigma); };
  };
  m.sample = [](std::size_t n, const std::vector<double>& p, const RngStream& stream) {
    std::vector<double> out = draw_normal(stream, n);
    for (auto& v : out) v = p[0] + p[1] * v;
    return out;
  };
  return m;
}

ModelAdapter stable_adapter() {
  ModelAdapter m;
  m.name = "stable";
  m.n_params = 4;
  m.fit = [](std::span<const double> data) {
    const StableFitResult r = stable_fit_mle(data);
    return std::vector<double>{r.params.alpha, r.params.beta, r.params.gamma, r.params.mu};
  };
  m.fit_fast = [](std::span<const double> data) {
    const StableParams p = detail::quantile_fit_params(data);
    return std::vector<double>{p.alpha, p.beta, p.gamma, p.mu};
  };
  m.make_cdf = [](const std::vector<double>& p) {
    auto grid = std::make_shared<StableGrid>(StableParams{p[0], p[1], p[2], p[3]});
    return [grid](double x) { return grid->cdf(x); };
  };
  m.sample = [](std::size_t n, const std::vector<double>& p, const RngStream& stream) {
    return stable_sample(n, StableParams{p[0], p[1], p[2], p[3]}, stream);
  };
  return m;
}

ModelAdapter nig_adapter() {
  ModelAdapter m;
  m.name = "nig";
  m.n_params = 4;
  m.fit = [](std::span<const double> data) {
    const NigFitResult r = nig_fit_mle(data);
    return std::vector<double>{r.params.alpha, r.params.beta, r.params.delta, r.params.mu};
  };
  m.fit_fast = [](std::span<const double> data) {
    const NigParams p = nig_fit_moments(data);
    return std::vector<double>{p.alpha, p.beta, p.delta, p.mu};
  };
  m.make_cdf = [](const std::vector<double>& p) {
    auto grid = std::make_shared<NigGrid>(NigParams{p[0], p[1], p[2], p[3]});
    return [grid](double x) { return grid->cdf(x); };
  };
  m.sample = [](std::size_t n, const std::vector<double>& p, const RngStream& stream) {
    return nig_sample(n, NigParams{p[0], p[1], p[2], p[3]}, stream);
  };
  return m;
}

// ---------------------------------------------------------------------------
// Bootstrap engine
// ---------------------------------------------------------------------------

void BootstrapConfig::validate() const {
  if (replications < 100) throw validation_error("bootstrap config: replications must be >= 100");
  if (!(significance > 0.0) || !(significance < 0.5)) {
    throw validation_error("bootstrap config: significance must lie in (0, 0.5)");
  }
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

GofReport bootstrap_gof(std::span<const double> data, const ModelAdapter& model,
                        const BootstrapConfig& cfg) {
  cfg.validate();
  const std::size_t n = data.size();

  const std::vector<double> theta = model.fit(data);
  auto fitted_cdf = model.make_cdf(theta);

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double d_obs = ks_statistic(sorted, fitted_cdf);

  const auto& inner_fit =
      (cfg.inner_fit == InnerFit::fast_quantile && model.fit_fast) ? model.fit_fast : model.fit;
  const RngStream base{cfg.master_seed, fnv1a(model.name)};

  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<double> d_sim(reps, -1.0);  // -1 marks a failed replication
  std::atomic<int> failures{0};
  parallel_for(reps, cfg.jobs, [&](std::size_t i) {
    const RngStream stream = base.substream(i);
    std::vector<double> sim = model.sample(n, theta, stream);
    std::sort(sim.begin(), sim.end());
    try {
      const std::vector<double> theta_i = inner_fit(sim);
      d_sim[i] = ks_statistic(sim, model.make_cdf(theta_i));
    } catch (const std::exception&) {
      failures.fetch_add(1);
    }
  });

  std::vector<double> d_ok;
  d_ok.reserve(reps);
  for (double d : d_sim) {
    if (d >= 0.0) d_ok.push_back(d);
  }
  if (failures.load() > 0.05 * cfg.replications || d_ok.empty()) {
    throw validation_error("bootstrap_gof: " + std::to_string(failures.load()) + " of " +
                           std::to_string(cfg.replications) + " replications failed to fit");
  }

  std::sort(d_ok.begin(), d_ok.end());
  const auto r_eff = d_ok.size();
  // order statistic at ceil((1 - significance) R), 1-indexed
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - cfg.significance) * static_cast<double>(r_eff)));
  rank = std::clamp<std::size_t>(rank, 1, r_eff);
  const double limit = d_ok[rank - 1];
  const auto n_ge = static_cast<std::size_t>(
      d_ok.end() - std::lower_bound(d_ok.begin(), d_ok.end(), d_obs));

  GofReport report;
  report.model = model.name;
  report.ks_stat = d_obs;
  report.ks_limit = limit;
  report.p_value = static_cast<double>(n_ge) / static_cast<double>(r_eff);
  report.rejected = d_obs > limit;

  const ChiSquareResult chi2 = pearson_chi_square(data, fitted_cdf, model.n_params, cfg.chi2_bins);
  report.chi2_stat = chi2.stat;
  report.chi2_dof = chi2.dof;
  report.chi2_pvalue = chi2.p_value;

  if (model.name == "gaussian") {
    report.ad_stat = anderson_darling_normal(data, theta[0], theta[1]).stat;
  }
  return report;
}

std::vector<GofReport> run_full_gof(std::span<const double> data, const BootstrapConfig& cfg) {
  std::vector<GofReport> reports;
  for (const ModelAdapter& model : {gaussian_adapter(), stable_adapter(), nig_adapter()}) {
    try {
      reports.push_back(bootstrap_gof(data, model, cfg));
    } catch (const std::exception& e) {
      GofReport failed;
      failed.model = model.name;
      failed.error = e.what();
      reports.push_back(std::move(failed));
    }
  }
  return reports;
}

std::vector<GofReport> run_full_gof(const ReturnSeries& data, const BootstrapConfig& cfg) {
  return run_full_gof(std::span{data.values}, cfg);
}

}  // namespace heavytail
