#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heavytail/returns.hpp"
#include "heavytail/rng.hpp"

namespace heavytail {

/// Two-sided Kolmogorov-Smirnov statistic,
///   D = max_i max(|F(x_i) - (i-1)/n|, |i/n - F(x_i)|),
/// over ascending data. Throws std::invalid_argument on unsorted input.
double ks_statistic(std::span<const double> sorted_data, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double stat = 0.0;
  int dof = 0;
  double p_value = 0.0;
  int bins = 0;
};

/// Pearson chi-square against a fitted continuous cdf with equiprobable bins
/// (equal-width cells of u = F(x)). Default bin count round(2 n^{2/5}), capped
/// so expected counts stay >= 5; bins_override forces an explicit count.
/// dof = bins - 1 - n_params_estimated.
ChiSquareResult pearson_chi_square(std::span<const double> data,
                                   const std::function<double(double)>& cdf,
                                   int n_params_estimated, int bins_override = 0);

struct AndersonDarlingResult {
  double stat = 0.0;     // A^2 with the estimated-parameter small-sample factor
  double p_value = 0.0;  // case-3 approximation (mean and variance estimated)
};

AndersonDarlingResult anderson_darling_normal(std::span<const double> data, double mu, double sigma);

/// One fitted-model family as seen by the bootstrap: how to fit it, evaluate
/// its cdf, and simulate from it. make_cdf builds a fast evaluator once per
/// parameter vector (grid-backed for stable/NIG).
struct ModelAdapter {
  std::string name;
  int n_params = 0;
  std::function<std::vector<double>(std::span<const double>)> fit;
  std::function<std::vector<double>(std::span<const double>)> fit_fast;  // inner-loop variant
  std::function<std::function<double(double)>(const std::vector<double>&)> make_cdf;
  std::function<std::vector<double>(std::size_t, const std::vector<double>&, const RngStream&)> sample;

  double cdf(double x, const std::vector<double>& params) const { return make_cdf(params)(x); }
};

ModelAdapter gaussian_adapter();
ModelAdapter stable_adapter();
ModelAdapter nig_adapter();

enum class InnerFit { full_mle, fast_quantile };

struct BootstrapConfig {
  int replications = 1000;
  double significance = 0.05;
  InnerFit inner_fit = InnerFit::full_mle;
  std::uint64_t master_seed = 0;
  int jobs = 0;            // worker cap; 0 = hardware concurrency
  int chi2_bins = 0;       // 0 = automatic
  void validate() const;   // replications >= 100, significance in (0, 0.5)
};

struct GofReport {
  std::string model;
  double ks_stat = 0.0;
  double ks_limit = 0.0;   // empirical (1 - significance) quantile of the D_i
  double p_value = 0.0;    // #{D_i >= D} / replications
  double chi2_stat = 0.0;
  int chi2_dof = 0;
  double chi2_pvalue = 0.0;
  std::optional<double> ad_stat;  // Gaussian row only
  bool rejected = false;          // D > ks_limit
  std::string error;              // set when this model's pipeline failed
};

/// The parametric-bootstrap loop: fit theta on data and compute D; then for
/// each replication simulate n variates from F(.;theta), refit, and compute
/// D_i against the refitted cdf. The limiting value is the order statistic at
/// ceil((1-significance) R); ties count toward the p-value (>=). Replications
/// are independent, each seeded by substream(master, index); more than 5%
/// fit failures raises an error.
GofReport bootstrap_gof(std::span<const double> data, const ModelAdapter& model,
                        const BootstrapConfig& cfg);

/// Gaussian, stable, and NIG rows; per-model failures are captured in the
/// report's error field rather than aborting the others.
std::vector<GofReport> run_full_gof(std::span<const double> data, const BootstrapConfig& cfg);
std::vector<GofReport> run_full_gof(const ReturnSeries& data, const BootstrapConfig& cfg);

}  // namespace heavytail
