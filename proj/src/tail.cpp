#include "heavytail/tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heavytail/common.hpp"
#include "heavytail/parallel.hpp"

namespace heavytail {

namespace {

std::vector<double> magnitudes(std::span<const double> data, TailSide side) {
  std::vector<double> mags;
  mags.reserve(data.size());
  for (double x : data) {
    switch (side) {
      case TailSide::both:
        if (x != 0.0) mags.push_back(std::abs(x));
        break;
      case TailSide::positive:
        if (x > 0.0) mags.push_back(x);
        break;
      case TailSide::negative:
        if (x < 0.0) mags.push_back(-x);
        break;
    }
  }
  return mags;
}

}  // namespace

double hill_estimator(std::span<const double> data, std::size_t k) {
  std::vector<double> mags = magnitudes(data, TailSide::both);
  const std::size_t n = mags.size();
  if (k < 10) throw validation_error("hill_estimator: k must be >= 10");
  if (k >= n / 2) throw validation_error("hill_estimator: k must be below n/2");
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double threshold = mags[k];  // (k+1)-th largest
  if (!(threshold > 0.0)) throw validation_error("hill_estimator: not enough positive magnitudes");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(mags[i] / threshold);
  if (!(sum > 0.0)) throw validation_error("hill_estimator: degenerate tail (tied magnitudes)");
  return static_cast<double>(k) / sum;
}

TailFit powerlaw_fit_ks(std::span<const double> data, TailSide side) {
  std::vector<double> mags = magnitudes(data, side);
  const std::size_t n = mags.size();
  if (n < 100) throw validation_error("powerlaw_fit_ks: need at least 100 positive magnitudes");
  std::sort(mags.begin(), mags.end(), std::greater<>());  // descending

  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(mags[i]);
  std::vector<double> prefix(n + 1, 0.0);  // prefix sums of log over descending order
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + logs[i];

  // candidate thresholds: every 5th order statistic above the median; widen
  // the stride for very large samples so the scan stays affordable
  const std::size_t m_max = n / 2;
  std::size_t stride = 5;
  if (m_max / stride > 4000) stride = m_max / 4000;

  TailFit best;
  best.ks_at_xmin = 2.0;
  bool found = false;
  for (std::size_t m = 10; m <= m_max; m += stride) {
    const double xmin = mags[m - 1];
    if (!(xmin > 0.0)) break;
    const double lsum = prefix[m] - static_cast<double>(m) * logs[m - 1];
    if (!(lsum > 0.0)) continue;  // ties at the threshold
    const double alpha = static_cast<double>(m) / lsum;

    // KS distance of the tail sample against the fitted Pareto
    double d = 0.0;
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      // ascending tail point x_(j+1) = mags[m-1-j]
      const double f = 1.0 - std::exp(-alpha * (logs[m - 1 - j] - logs[m - 1]));
      const double lower = std::abs(f - static_cast<double>(j) * inv_m);
      const double upper = std::abs(static_cast<double>(j + 1) * inv_m - f);
      d = std::max(d, std::max(lower, upper));
    }
    if (d < best.ks_at_xmin) {
      best.alpha_tail = alpha;
      best.xmin = xmin;
      best.n_tail = m;
      best.ks_at_xmin = d;
      found = true;
    }
  }
  if (!found) throw validation_error("powerlaw_fit_ks: no viable threshold candidate");
  return best;
}

TailStudyResult sample_size_study(const StableParams& true_params,
                                  std::span<const std::size_t> sizes, int seeds_per_size,
                                  std::uint64_t master_seed, int jobs, TailSide side) {
  true_params.validate();
  if (sizes.empty()) throw validation_error("sample_size_study: sizes must be nonempty");
  if (seeds_per_size < 1) throw validation_error("sample_size_study: seeds_per_size must be >= 1");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw validation_error("sample_size_study: sizes must be strictly increasing");
    }
  }

  const std::size_t n_cells = sizes.size() * static_cast<std::size_t>(seeds_per_size);
  std::vector<double> alpha_cells(n_cells, std::numeric_limits<double>::quiet_NaN());
  const RngStream root{master_seed, 0x7a11};

  parallel_for(n_cells, jobs, [&](std::size_t cell) {
    const std::size_t size_idx = cell / static_cast<std::size_t>(seeds_per_size);
    const std::size_t seed_idx = cell % static_cast<std::size_t>(seeds_per_size);
    const RngStream stream = root.substream(size_idx).substream(seed_idx);
    const std::vector<double> sample = stable_sample(sizes[size_idx], true_params, stream);
    try {
      alpha_cells[cell] = powerlaw_fit_ks(sample, side).alpha_tail;
    } catch (const std::exception&) {
      // cell stays NaN; recorded through the row's seed count
    }
  });

  TailStudyResult result;
  result.true_params = true_params;
  result.seeds_per_size = seeds_per_size;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    double sum = 0.0, sum2 = 0.0;
    int ok = 0;
    for (int j = 0; j < seeds_per_size; ++j) {
      const double a = alpha_cells[s * seeds_per_size + j];
      if (std::isnan(a)) continue;
      sum += a;
      sum2 += a * a;
      ++ok;
    }
    TailStudyRow row;
    row.sample_size = sizes[s];
    row.seeds = ok;
    if (ok > 0) {
      row.alpha_hat_mean = sum / ok;
      row.alpha_hat_sd = ok > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / ok) / (ok - 1))) : 0.0;
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace heavytail
