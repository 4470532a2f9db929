#include "heavytail/returns.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "heavytail/common.hpp"

namespace heavytail {

namespace {

bool parse_iso_date(const std::string& s, int& key) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  auto num = [](const char* b, const char* e, int& out) {
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
  };
  const char* c = s.data();
  if (!num(c, c + 4, y) || !num(c + 5, c + 7, m) || !num(c + 8, c + 10, d)) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) return false;
  key = y * 10000 + m * 100 + d;
  return true;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PriceSeries::validate() const {
  if (dates.size() != closes.size()) throw validation_error("price series: date/close length mismatch");
  if (closes.size() < 2) throw validation_error("price series: fewer than 2 prices");
  int prev_key = -1;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    int key = 0;
    if (!parse_iso_date(dates[i], key)) {
      throw validation_error("price series: bad date '" + dates[i] + "'");
    }
    if (key == prev_key) throw validation_error("price series: duplicated date " + dates[i]);
    if (key < prev_key) throw validation_error("price series: dates not ascending at " + dates[i]);
    prev_key = key;
    if (!(closes[i] > 0.0) || !std::isfinite(closes[i])) {
      throw validation_error("price series: non-positive close on " + dates[i]);
    }
  }
}

PriceSeries parse_prices_csv(const std::string& text, const std::string& label) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  PriceSeries out;

  if (!std::getline(in, line)) throw parse_error(label + ": empty file", 1);
  ++lineno;
  {
    std::string header = strip(line);
    if (header != "date,close") {
      throw parse_error(label + ": expected header 'date,close', got '" + header + "'", lineno);
    }
  }

  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = strip(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos) throw parse_error(label + ": missing comma", lineno);
    const std::string date = strip(row.substr(0, comma));
    const std::string close_str = strip(row.substr(comma + 1));
    if (close_str.empty()) {
      ++out.skipped_rows;  // missing close: skip with a warning count
      continue;
    }
    double close = 0.0;
    const char* b = close_str.data();
    const char* e = b + close_str.size();
    auto [p, ec] = std::from_chars(b, e, close);
    if (ec != std::errc() || p != e) {
      throw parse_error(label + ": bad close value '" + close_str + "'", lineno);
    }
    out.dates.push_back(date);
    out.closes.push_back(close);
  }

  out.validate();
  return out;
}

PriceSeries load_prices_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_prices_csv(buf.str(), path);
}

ReturnSeries log_returns(const PriceSeries& prices) {
  prices.validate();
  ReturnSeries out;
  out.values.resize(prices.closes.size() - 1);
  for (std::size_t i = 0; i + 1 < prices.closes.size(); ++i) {
    out.values[i] = std::log(prices.closes[i + 1]) - std::log(prices.closes[i]);
  }
  return out;
}

SummaryStats summary_stats(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 4) throw validation_error("summary_stats: need at least 4 observations");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (!(m2 > 0.0)) throw validation_error("summary_stats: zero variance");

  SummaryStats s;
  s.mean = mean;
  s.std_dev = std::sqrt(m2 * static_cast<double>(n) / static_cast<double>(n - 1));
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  return s;
}

SummaryStats summary_stats(const ReturnSeries& returns) { return summary_stats(std::span{returns.values}); }

GaussianFit gaussian_fit(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw validation_error("gaussian_fit: need at least 2 observations");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  if (!(ss > 0.0)) throw validation_error("gaussian_fit: zero variance");
  GaussianFit fit;
  fit.mu = mean;
  fit.sigma = std::sqrt(ss / static_cast<double>(n));
  fit.sigma_unbiased = std::sqrt(ss / static_cast<double>(n - 1));
  return fit;
}

GaussianFit gaussian_fit(const ReturnSeries& returns) { return gaussian_fit(std::span{returns.values}); }

}  // namespace heavytail
