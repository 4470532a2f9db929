#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace heavytail {

/// Daily close series. Dates strictly increasing, all closes positive.
struct PriceSeries {
  std::vector<std::string> dates;  // ISO-8601 YYYY-MM-DD
  std::vector<double> closes;
  std::size_t skipped_rows = 0;  // rows dropped for a missing close field

  void validate() const;  // throws validation_error on invariant breaks
};

/// Log-return observations, values[i] = ln(closes[i+1]) - ln(closes[i]).
struct ReturnSeries {
  std::vector<double> values;
  std::string source_label;
};

struct SummaryStats {
  double mean = 0.0;
  double std_dev = 0.0;   // n-1 denominator
  double skewness = 0.0;  // standardized third moment
  double kurtosis = 0.0;  // Pearson (non-excess) fourth moment; 3 for a Gaussian
};

struct GaussianFit {
  double mu = 0.0;
  double sigma = 0.0;           // maximum-likelihood (n denominator)
  double sigma_unbiased = 0.0;  // n-1 denominator, for descriptive use
};

/// Parse a `date,close` CSV (header required, ascending ISO dates, positive
/// closes). Rows with an empty close field are skipped and counted. Throws
/// parse_error with the offending line number on malformed rows and
/// validation_error on non-monotone dates / non-positive closes.
PriceSeries load_prices_csv(const std::string& path);

/// Same parser over an in-memory document; `path` only labels error messages.
PriceSeries parse_prices_csv(const std::string& text, const std::string& label);

ReturnSeries log_returns(const PriceSeries& prices);

/// Sample mean, n-1 standard deviation, and biased standardized third/fourth
/// moments. Requires length >= 4 and nonzero variance.
SummaryStats summary_stats(const ReturnSeries& returns);
SummaryStats summary_stats(std::span<const double> values);

/// Gaussian maximum-likelihood fit (mean, sigma with n denominator).
GaussianFit gaussian_fit(const ReturnSeries& returns);
GaussianFit gaussian_fit(std::span<const double> values);

}  // namespace heavytail
