#include "heavytail/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>

#include <json.hpp>

#include "heavytail/common.hpp"
#include "heavytail/nig.hpp"
#include "heavytail/returns.hpp"

namespace heavytail {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write output file: " + path.string());
  out << content;
}

ReturnSeries load_returns(const RunConfig& cfg, std::size_t* skipped = nullptr) {
  const PriceSeries prices = load_prices_csv(cfg.input_path);
  if (skipped) *skipped = prices.skipped_rows;
  ReturnSeries r = log_returns(prices);
  r.source_label = cfg.input_path;
  return r;
}

double gaussian_loglik(std::size_t n, double sigma_mle) {
  // at the MLE the exponent sums to -n/2
  return -0.5 * static_cast<double>(n) *
         (std::log(2.0 * std::numbers::pi * sigma_mle * sigma_mle) + 1.0);
}

bool wants(const RunConfig& cfg, const std::string& model) {
  return std::find(cfg.models.begin(), cfg.models.end(), model) != cfg.models.end();
}

int classify_exit(const std::exception& e) {
  if (dynamic_cast<const validation_error*>(&e) || dynamic_cast<const parse_error*>(&e)) {
    return kExitUsage;
  }
  return kExitComputational;
}

}  // namespace

void RunConfig::validate() const {
  if (models.empty()) throw validation_error("run config: models must be nonempty");
  const std::set<std::string> known{"gaussian", "stable", "nig"};
  for (const auto& m : models) {
    if (!known.count(m)) throw validation_error("run config: unknown model '" + m + "'");
  }
  if (histogram_bins < 10) throw validation_error("run config: histogram_bins must be >= 10");
}

std::string gof_reports_to_json(const std::vector<GofReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json row;
    row["model"] = r.model;
    if (!r.error.empty()) {
      row["error"] = r.error;
      arr.push_back(row);
      continue;
    }
    row["ks_stat"] = r.ks_stat;
    row["ks_limit"] = r.ks_limit;
    row["p_value"] = r.p_value;
    row["chi2_stat"] = r.chi2_stat;
    row["chi2_dof"] = r.chi2_dof;
    row["chi2_pvalue"] = r.chi2_pvalue;
    if (r.ad_stat.has_value()) {
      row["ad_stat"] = *r.ad_stat;
    } else {
      row["ad_stat"] = nullptr;
    }
    row["rejected"] = r.rejected;
    arr.push_back(row);
  }
  return arr.dump(2) + "\n";
}

std::string tail_study_to_csv(const TailStudyResult& result) {
  std::string out = "sample_size,alpha_hat_mean,alpha_hat_sd,seeds\n";
  for (const auto& row : result.rows) {
    out += std::to_string(row.sample_size) + ",";
    if (row.seeds > 0) {
      out += fmt(row.alpha_hat_mean) + "," + fmt(row.alpha_hat_sd);
    } else {
      out += ",";  // cell failed across all seeds
    }
    out += "," + std::to_string(row.seeds) + "\n";
  }
  return out;
}

int cmd_fit(const RunConfig& cfg) {
  try {
    cfg.validate();
    std::size_t skipped = 0;
    const ReturnSeries returns = load_returns(cfg, &skipped);
    const SummaryStats stats = summary_stats(returns);

    json doc;
    doc["input"] = cfg.input_path;
    doc["n_returns"] = returns.values.size();
    doc["skipped_rows"] = skipped;
    doc["summary"] = {{"mean", stats.mean},
                      {"std_dev", stats.std_dev},
                      {"skewness", stats.skewness},
                      {"kurtosis", stats.kurtosis}};
    json fits;
    if (wants(cfg, "gaussian")) {
      const GaussianFit g = gaussian_fit(returns);
      fits["gaussian"] = {{"mu", g.mu},
                          {"sigma", g.sigma},
                          {"sigma_unbiased", g.sigma_unbiased},
                          {"log_likelihood", gaussian_loglik(returns.values.size(), g.sigma)}};
    }
    if (wants(cfg, "stable")) {
      const StableFitResult s = stable_fit_mle(returns);
      fits["stable"] = {{"alpha", s.params.alpha},     {"beta", s.params.beta},
                        {"gamma", s.params.gamma},     {"mu", s.params.mu},
                        {"log_likelihood", s.log_likelihood},
                        {"converged", s.converged},
                        {"method", s.method == StableFitMethod::mle ? "mle" : "quantile"}};
    }
    if (wants(cfg, "nig")) {
      const NigFitResult f = nig_fit_mle(returns);
      fits["nig"] = {{"alpha", f.params.alpha},   {"beta", f.params.beta},
                     {"delta", f.params.delta},   {"mu", f.params.mu},
                     {"log_likelihood", f.log_likelihood},
                     {"converged", f.converged}};
    }
    doc["fits"] = std::move(fits);
    write_file(cfg.output_dir, "fits.json", doc.dump(2) + "\n");
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "fit: " << e.what() << "\n";
    return classify_exit(e);
  }
}

int cmd_gof(const RunConfig& cfg) {
  try {
    cfg.validate();
    const ReturnSeries returns = load_returns(cfg);

    std::vector<GofReport> reports;
    for (const ModelAdapter& model : {gaussian_adapter(), stable_adapter(), nig_adapter()}) {
      if (!wants(cfg, model.name)) continue;
      try {
        reports.push_back(bootstrap_gof(returns.values, model, cfg.bootstrap));
      } catch (const std::exception& e) {
        GofReport failed;
        failed.model = model.name;
        failed.error = e.what();
        reports.push_back(std::move(failed));
      }
    }
    write_file(cfg.output_dir, "gof.json", gof_reports_to_json(reports));

    std::printf("%-10s %10s %10s %8s %12s %10s %8s  %s\n", "model", "ks_stat", "ks_limit",
                "p_value", "chi2(dof)", "chi2_p", "ad", "reject H0?");
    for (const auto& r : reports) {
      if (!r.error.empty()) {
        std::printf("%-10s failed: %s\n", r.model.c_str(), r.error.c_str());
        continue;
      }
      char chi[32];
      std::snprintf(chi, sizeof(chi), "%.4g(%d)", r.chi2_stat, r.chi2_dof);
      std::printf("%-10s %10.4f %10.4f %8.3f %12s %10.3g %8s  %s\n", r.model.c_str(), r.ks_stat,
                  r.ks_limit, r.p_value, chi, r.chi2_pvalue,
                  r.ad_stat ? fmt(*r.ad_stat).c_str() : "-", r.rejected ? "yes" : "no");
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "gof: " << e.what() << "\n";
    return classify_exit(e);
  }
}

int cmd_tailstudy(const TailStudyConfig& cfg) {
  try {
    const TailStudyResult result = sample_size_study(cfg.params, cfg.sizes, cfg.seeds_per_size,
                                                     cfg.master_seed, cfg.jobs);
    std::size_t failed_cells = 0;
    for (const auto& row : result.rows) {
      if (row.seeds < cfg.seeds_per_size) {
        failed_cells += static_cast<std::size_t>(cfg.seeds_per_size - row.seeds);
      }
    }
    if (failed_cells > 0) {
      std::cerr << "tailstudy: warning: " << failed_cells << " cell(s) failed to fit\n";
    }
    const std::filesystem::path out(cfg.out_path);
    std::filesystem::create_directories(out.has_parent_path() ? out.parent_path()
                                                              : std::filesystem::path("."));
    std::ofstream f(out, std::ios::binary);
    if (!f) throw validation_error("cannot write output file: " + cfg.out_path);
    f << tail_study_to_csv(result);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "tailstudy: " << e.what() << "\n";
    return classify_exit(e);
  }
}

int cmd_hist(const RunConfig& cfg) {
  try {
    cfg.validate();
    const ReturnSeries returns = load_returns(cfg);
    const auto& v = returns.values;
    const std::size_t n = v.size();
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    double lo = *mn_it, hi = *mx_it;
    if (!(hi > lo)) throw validation_error("hist: degenerate sample (all values equal)");
    const int bins = cfg.histogram_bins;
    const double width = (hi - lo) / bins;

    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double x : v) {
      auto idx = static_cast<std::size_t>((x - lo) / width);
      if (idx >= counts.size()) idx = counts.size() - 1;  // right edge closes the last bin
      counts[idx] += 1.0;
    }

    std::string header = "bin_center,empirical_density";
    std::vector<std::pair<std::string, std::function<double(double)>>> overlays;
    if (wants(cfg, "gaussian")) {
      const GaussianFit g = gaussian_fit(returns);
      overlays.emplace_back("gaussian_density", [g](double x) {
        const double z = (x - g.mu) / g.sigma;
        return std::exp(-0.5 * z * z) / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
      });
    }
    if (wants(cfg, "stable")) {
      const StableFitResult s = stable_fit_mle(returns);
      auto grid = std::make_shared<StableGrid>(s.params);
      overlays.emplace_back("stable_density", [grid](double x) { return grid->pdf(x); });
    }
    if (wants(cfg, "nig")) {
      const NigFitResult f = nig_fit_mle(returns);
      const NigParams p = f.params;
      overlays.emplace_back("nig_density", [p](double x) { return nig_pdf(x, p); });
    }
    for (const auto& [name, unused] : overlays) header += "," + name;

    std::string out = header + "\n";
    for (int b = 0; b < bins; ++b) {
      const double center = lo + (b + 0.5) * width;
      out += fmt(center) + "," + fmt(counts[static_cast<std::size_t>(b)] / (n * width));
      for (const auto& [name, density] : overlays) out += "," + fmt(density(center));
      out += "\n";
    }
    write_file(cfg.output_dir, "overlay.csv", out);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "hist: " << e.what() << "\n";
    return classify_exit(e);
  }
}

int cmd_simulate(const SimulateConfig& cfg) {
  try {
    std::vector<double> sample;
    const RngStream stream{cfg.seed, 0};
    if (cfg.model == "stable") {
      sample = stable_sample(cfg.n, cfg.stable_params, stream);
    } else if (cfg.model == "nig") {
      sample = nig_sample(cfg.n, cfg.nig_params, stream);
    } else {
      throw validation_error("simulate: model must be 'stable' or 'nig'");
    }
    const std::filesystem::path out(cfg.out_path);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream f(out, std::ios::binary);
    if (!f) throw validation_error("cannot write output file: " + cfg.out_path);
    f << "value\n";
    for (double x : sample) f << fmt(x) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return classify_exit(e);
  }
}

}  // namespace heavytail
