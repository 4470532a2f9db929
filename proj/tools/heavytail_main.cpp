#include <cstdint>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heavytail/report.hpp"

using namespace heavytail;

namespace {

void add_seed_option(CLI::App* cmd, std::uint64_t& seed) {
  cmd->add_option("--seed", seed, "master seed (fixed default keeps runs reproducible)")
      ->envname("HEAVYTAIL_SEED")
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, RunConfig& cfg, std::uint64_t& seed, bool bootstrap_opts) {
  cmd->add_option("--input", cfg.input_path, "CSV with header 'date,close'")->required();
  cmd->add_option("--models", cfg.models, "subset of gaussian,stable,nig")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--out", cfg.output_dir, "output directory")->capture_default_str();
  add_seed_option(cmd, seed);
  if (bootstrap_opts) {
    cmd->add_option("--replications", cfg.bootstrap.replications, "bootstrap replications")
        ->capture_default_str();
    cmd->add_option("--significance", cfg.bootstrap.significance, "rejection level")
        ->capture_default_str();
    std::map<std::string, InnerFit> inner{{"mle", InnerFit::full_mle},
                                          {"quantile", InnerFit::fast_quantile}};
    cmd->add_option("--inner-fit", cfg.bootstrap.inner_fit, "refit method inside the loop")
        ->transform(CLI::CheckedTransformer(inner, CLI::ignore_case))
        ->default_str("mle");
    cmd->add_option("--jobs", cfg.bootstrap.jobs, "worker thread cap (0 = all cores)")
        ->capture_default_str();
    cmd->add_option("--chi2-bins", cfg.bootstrap.chi2_bins,
                    "override the chi-square bin count (0 = automatic)")
        ->capture_default_str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavytail: fit Gaussian / alpha-stable / NIG laws to log-return series,\n"
               "run bootstrap goodness-of-fit tests, and study tail-index bias"};
  app.require_subcommand(1);

  RunConfig fit_cfg, gof_cfg, hist_cfg;
  std::uint64_t fit_seed = kDefaultSeed, gof_seed = kDefaultSeed, hist_seed = kDefaultSeed;

  auto* fit = app.add_subcommand("fit", "estimate parameters, write fits.json");
  add_run_options(fit, fit_cfg, fit_seed, false);

  auto* gof = app.add_subcommand("gof", "bootstrap KS / chi-square / AD tests, write gof.json");
  add_run_options(gof, gof_cfg, gof_seed, true);

  auto* hist = app.add_subcommand("hist", "histogram + fitted-density overlay, write overlay.csv");
  add_run_options(hist, hist_cfg, hist_seed, false);
  hist->add_option("--bins", hist_cfg.histogram_bins, "histogram bin count")->capture_default_str();

  TailStudyConfig ts_cfg;
  auto* tailstudy = app.add_subcommand("tailstudy", "tail-exponent vs sample-size study (CSV)");
  tailstudy->add_option("--alpha", ts_cfg.params.alpha, "true stability index")->capture_default_str();
  tailstudy->add_option("--beta", ts_cfg.params.beta, "true skewness")->capture_default_str();
  tailstudy->add_option("--gamma", ts_cfg.params.gamma, "true scale")->capture_default_str();
  tailstudy->add_option("--mu", ts_cfg.params.mu, "true location")->capture_default_str();
  tailstudy->add_option("--sizes", ts_cfg.sizes, "sample sizes, ascending")
      ->delimiter(',')
      ->capture_default_str();
  tailstudy->add_option("--seeds-per-size", ts_cfg.seeds_per_size, "seeds averaged per size")
      ->capture_default_str();
  tailstudy->add_option("--out", ts_cfg.out_path, "output CSV path")->capture_default_str();
  tailstudy->add_option("--jobs", ts_cfg.jobs, "worker thread cap (0 = all cores)")
      ->capture_default_str();
  add_seed_option(tailstudy, ts_cfg.master_seed);

  SimulateConfig sim_cfg;
  auto* simulate = app.add_subcommand("simulate", "draw stable or NIG variates to CSV");
  simulate->add_option("--model", sim_cfg.model, "stable or nig")->capture_default_str();
  simulate->add_option("--n", sim_cfg.n, "number of draws")->capture_default_str();
  simulate->add_option("--alpha", sim_cfg.stable_params.alpha, "stable alpha / NIG alpha")
      ->capture_default_str();
  simulate->add_option("--beta", sim_cfg.stable_params.beta, "stable beta / NIG beta")
      ->capture_default_str();
  simulate->add_option("--gamma", sim_cfg.stable_params.gamma, "stable scale")->capture_default_str();
  simulate->add_option("--delta", sim_cfg.nig_params.delta, "NIG scale")->capture_default_str();
  simulate->add_option("--mu", sim_cfg.stable_params.mu, "location")->capture_default_str();
  simulate->add_option("--out", sim_cfg.out_path, "output CSV path")->capture_default_str();
  add_seed_option(simulate, sim_cfg.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  if (fit->parsed()) {
    fit_cfg.bootstrap.master_seed = fit_seed;
    return cmd_fit(fit_cfg);
  }
  if (gof->parsed()) {
    gof_cfg.bootstrap.master_seed = gof_seed;
    return cmd_gof(gof_cfg);
  }
  if (hist->parsed()) {
    hist_cfg.bootstrap.master_seed = hist_seed;
    return cmd_hist(hist_cfg);
  }
  if (tailstudy->parsed()) return cmd_tailstudy(ts_cfg);
  if (simulate->parsed()) {
    sim_cfg.nig_params.alpha = sim_cfg.stable_params.alpha;
    sim_cfg.nig_params.beta = sim_cfg.stable_params.beta;
    sim_cfg.nig_params.mu = sim_cfg.stable_params.mu;
    return cmd_simulate(sim_cfg);
  }
  return kExitUsage;
}
