#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "heavytail/stable.hpp"

namespace heavytail {

/// Power-law tail fit in the survival-exponent convention: P(|X| > x) ~ x^{-alpha_tail}
/// (density exponent -(1 + alpha_tail)).
struct TailFit {
  double alpha_tail = 0.0;
  double xmin = 0.0;
  std::size_t n_tail = 0;
  double ks_at_xmin = 0.0;
};

struct TailStudyRow {
  std::size_t sample_size = 0;
  double alpha_hat_mean = 0.0;
  double alpha_hat_sd = 0.0;
  int seeds = 0;  // successful cells contributing to the row
};

struct TailStudyResult {
  std::vector<TailStudyRow> rows;
  StableParams true_params;
  int seeds_per_size = 0;
};

enum class TailSide { both, positive, negative };

/// Hill estimate over the k largest magnitudes. Requires 10 <= k < n/2.
double hill_estimator(std::span<const double> data, std::size_t k);

/// Continuous-Pareto MLE with the threshold selected by minimizing the KS
/// distance between the tail sample and the fitted Pareto. Candidate xmin
/// values run over every 5th order statistic above the median (the stride
/// widens above 2e5 magnitudes to keep the scan near-quadratic-free).
TailFit powerlaw_fit_ks(std::span<const double> data, TailSide side = TailSide::both);

/// Simulate stable samples of each size, fit the pooled-magnitude tail
/// exponent, and average over seeds. Deterministic given master_seed; cells
/// that fail to fit are skipped and reflected in the row's seed count.
TailStudyResult sample_size_study(const StableParams& true_params,
                                  std::span<const std::size_t> sizes, int seeds_per_size,
                                  std::uint64_t master_seed, int jobs = 0,
                                  TailSide side = TailSide::both);

}  // namespace heavytail
