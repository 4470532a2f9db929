// Acceptance suite: runs each numbered criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "heavytail/gof.hpp"
#include "heavytail/nig.hpp"
#include "heavytail/parallel.hpp"
#include "heavytail/quadrature.hpp"
#include "heavytail/report.hpp"
#include "heavytail/returns.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/stable.hpp"
#include "heavytail/tail.hpp"

using namespace heavytail;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  explicit Criterion(int number, std::string title)
      : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  void result(bool pass, const std::string& detail) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("[%2d] %s  %-38s %s (%.1f s)\n", number_, pass ? "PASS" : "FAIL", title_.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
  }

 private:
  int number_;
  std::string title_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

const StableParams kTable2Stable{1.64, 0.219, 0.00815, -0.000186};
const NigParams kTable2Nig{55.43, -0.2990, 0.01254, -0.000541};

void criterion1_closed_forms() {
  Criterion c(1, "stable pdf vs closed forms");
  double worst_gauss = 0.0, worst_cauchy = 0.0;
  const StableParams gauss{2.0, 0.0, 1.0, 0.0};
  const StableParams cauchy{1.0, 0.0, 1.0, 0.0};
  for (int i = 0; i <= 400; ++i) {
    const double x = -10.0 + i * 0.05;
    const double g_exact = std::exp(-x * x / 4.0) / (2.0 * std::sqrt(M_PI));
    const double c_exact = 1.0 / (M_PI * (1.0 + x * x));
    worst_gauss = std::max(worst_gauss, std::abs(stable_pdf(x, gauss) - g_exact));
    worst_cauchy = std::max(worst_cauchy, std::abs(stable_pdf(x, cauchy) - c_exact));
  }
  const bool pass = worst_gauss < 1e-7 && worst_cauchy < 1e-7;
  c.result(pass, fmt("max abs err: gauss %.1e cauchy %.1e (tol 1e-7)", worst_gauss, worst_cauchy));
}

void criterion2_normalization() {
  Criterion c(2, "density normalization");
  double worst = 0.0;
  for (double alpha : {0.6, 1.0, 1.5, 1.64, 2.0}) {
    const StableParams p{alpha, alpha < 2.0 ? 0.4 : 0.0, 1.0, 0.0};
    const double body = integrate_adaptive([&](double x) { return stable_pdf(x, p); }, -60.0, 60.0,
                                           QuadratureSpec{1e-9, 1e-7, 3000});
    const double mass = body + detail::stable_tail_sf(60.0, p.alpha, p.beta) +
                        detail::stable_tail_sf(60.0, p.alpha, -p.beta);
    worst = std::max(worst, std::abs(mass - 1.0));
  }
  for (double alpha : {1.0, 5.0, 55.43}) {
    for (double bf : {0.0, 0.3, -0.3}) {
      for (double delta : {0.01, 1.0}) {
        const NigParams p{alpha, bf * alpha, delta, 0.0};
        const double sd = std::sqrt(p.variance());
        const double mass =
            integrate_adaptive([&](double x) { return nig_pdf(x, p); }, p.mean() - 40.0 * sd,
                               p.mean() + 40.0 * sd, QuadratureSpec{1e-10, 1e-8, 4000});
        worst = std::max(worst, std::abs(mass - 1.0));
      }
    }
  }
  c.result(worst < 1e-4, fmt("worst |mass - 1| = %.2e (tol 1e-4)", worst));
}

void criterion3_tail_slope() {
  Criterion c(3, "tail exponent of the density");
  std::string detail;
  bool pass = true;
  for (double alpha : {1.2, 1.64}) {
    const StableParams p{alpha, 0.0, 1.0, 0.0};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double x = 20.0; x <= 100.0; x *= 1.2) {
      const double lx = std::log(x), ly = std::log(stable_pdf(x, p));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    pass = pass && std::abs(slope + 1.0 + alpha) < 0.05;
    detail += fmt("a=%.2f slope %.3f (want %.3f)  ", alpha, slope, -(1.0 + alpha));
  }
  c.result(pass, detail + "(tol 0.05)");
}

void criterion4_sampler_fidelity() {
  Criterion c(4, "sampler KS fidelity, 100 seeds");
  const StableParams p{1.7, 0.0, 1.0, 0.0};
  const StableGrid grid(p);
  const std::size_t n = 100000;
  const double crit = 1.63 / std::sqrt(static_cast<double>(n));
  std::atomic<int> passed{0};
  parallel_for(100, 0, [&](std::size_t seed) {
    auto x = stable_sample(n, p, RngStream{1704, seed});
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = grid.cdf(x[i]);
      d = std::max(d, std::max(std::abs(f - static_cast<double>(i) / n),
                               std::abs(static_cast<double>(i + 1) / n - f)));
    }
    if (d < crit) passed.fetch_add(1);
  });
  c.result(passed >= 95, fmt("%d/100 below the 1%% critical value (need >= 95)", passed.load()));
}

void criterion5_fit_recovery() {
  Criterion c(5, "stable MLE recovery at n = 2502");
  std::atomic<int> inside{0};
  parallel_for(100, 0, [&](std::size_t seed) {
    const auto x = stable_sample(2502, kTable2Stable, RngStream{5005, seed});
    const StableFitResult r = stable_fit_mle(std::span<const double>{x});
    if (std::abs(r.params.alpha - kTable2Stable.alpha) <= 0.12) inside.fetch_add(1);
  });
  c.result(inside >= 90, fmt("alpha within +-0.12 in %d/100 seeds (need >= 90)", inside.load()));
}

void criterion6_gaussian_limit() {
  Criterion c(6, "gaussian bootstrap limiting value");
  const auto data = draw_normal(RngStream{606, 0}, 2502);
  BootstrapConfig cfg;
  cfg.replications = 1000;
  cfg.jobs = 0;
  double mean_limit = 0.0;
  bool each_ok = true;
  std::string detail = "limits:";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.master_seed = 1000 + seed;
    const GofReport rep = bootstrap_gof(data, gaussian_adapter(), cfg);
    mean_limit += rep.ks_limit / 5.0;
    each_ok = each_ok && std::abs(rep.ks_limit - 0.0184) <= 0.0015;
    detail += fmt(" %.4f", rep.ks_limit);
  }
  // per-seed check against the published 0.0184; the asymptotic 0.886/sqrt(n)
  // comparison uses the seed mean (single-seed quantile noise is ~0.0005)
  const double lilliefors = 0.886 / std::sqrt(2502.0);
  const bool mean_ok = std::abs(mean_limit - lilliefors) <= 0.001;
  c.result(each_ok && mean_ok,
           detail + fmt(" | each vs 0.0184 +-0.0015: %s; mean %.5f vs %.5f +-0.001",
                        each_ok ? "ok" : "out", mean_limit, lilliefors));
}

void criterion7_stable_limit() {
  Criterion c(7, "stable bootstrap limiting value");
  const auto data = stable_sample(2502, kTable2Stable, RngStream{20100409, 1});
  BootstrapConfig cfg;
  cfg.replications = 1000;
  cfg.inner_fit = InnerFit::fast_quantile;
  cfg.jobs = 0;
  double mean_limit = 0.0;
  std::string detail = "limits:";
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    cfg.master_seed = 7000 + seed;
    const GofReport rep = bootstrap_gof(data, stable_adapter(), cfg);
    mean_limit += rep.ks_limit / 3.0;
    detail += fmt(" %.4f", rep.ks_limit);
  }
  const bool pass = std::abs(mean_limit - 0.0209) <= 0.003;
  c.result(pass, detail + fmt(" | mean %.5f vs 0.0209 +-0.003 (quantile inner fit)", mean_limit));
}

void criterion8_tail_study() {
  Criterion c(8, "tail-index bias study (Table-5 scale)");
  const StableParams p{1.7, 0.0, 1.0, 0.0};
  const std::vector<std::size_t> sizes{1000, 2502, 100000, 1000000};
  const TailStudyResult r = sample_size_study(p, sizes, 20, 42, 0);
  const double a1000 = r.rows[0].alpha_hat_mean;
  const double a2502 = r.rows[1].alpha_hat_mean;
  const double a1e5 = r.rows[2].alpha_hat_mean;
  const double a1e6 = r.rows[3].alpha_hat_mean;
  const bool pass = a1000 > 2.0 && a2502 >= 1.9 && a2502 <= 2.4 && a1e5 >= 1.6 && a1e5 <= 1.95 &&
                    a1e6 >= 1.5 && a1e6 <= 1.85;
  c.result(pass, fmt("mean alpha-hat: 1e3 %.3f (>2.0) | 2502 %.3f ([1.9,2.4]) | 1e5 %.3f "
                     "([1.6,1.95]) | 1e6 %.3f ([1.5,1.85])",
                     a1000, a2502, a1e5, a1e6));
}

void criterion9_null_calibration() {
  Criterion c(9, "null calibration at n = 500, 200 seeds");
  // matched-procedure configuration: the same (fast) estimator fits both the
  // data and every replication; mismatched fit pairs are not calibrated
  const std::size_t n = 500;
  const int outer = 200;
  BootstrapConfig cfg;
  cfg.replications = 1000;
  cfg.inner_fit = InnerFit::fast_quantile;
  cfg.jobs = 0;

  std::string detail;
  bool pass = true;
  for (int which = 0; which < 3; ++which) {
    ModelAdapter adapter = which == 0   ? gaussian_adapter()
                           : which == 1 ? stable_adapter()
                                        : nig_adapter();
    adapter.fit = adapter.fit_fast;
    std::atomic<int> rejects{0};
    std::vector<std::uint8_t> flags(outer, 0);
    parallel_for(outer, 0, [&](std::size_t seed) {
      std::vector<double> data;
      const RngStream ds{909, seed * 3 + static_cast<std::uint64_t>(which)};
      if (which == 0) data = adapter.sample(n, {0.0, 1.0}, ds);
      if (which == 1) data = stable_sample(n, kTable2Stable, ds);
      if (which == 2) data = nig_sample(n, kTable2Nig, ds);
      BootstrapConfig local = cfg;
      local.master_seed = 5000 + seed;
      local.jobs = 1;
      if (bootstrap_gof(data, adapter, local).rejected) flags[seed] = 1;
    });
    int count = 0;
    for (auto f : flags) count += f;
    const double rate = 100.0 * count / outer;
    const bool ok = rate >= 3.0 && rate <= 7.0;
    pass = pass && ok;
    detail += fmt("%s %.1f%%%s ", adapter.name.c_str(), rate, ok ? "" : "(out)");
  }
  c.result(pass, detail + "(band [3%,7%])");
  if (!pass) {
    std::printf("     note: the NIG rate exceeds the band at every n and fit method tried;\n"
                "     the bootstrap limit is unbiased on average but varies with the fitted\n"
                "     shape (sd ~9%% of its value), and a variable threshold against the\n"
                "     convex upper tail of D inflates rejection (Jensen). Gaussian and\n"
                "     stable are near-pivotal, so their limits barely vary and calibrate.\n");
  }
}

void criterion10_pipeline_shape() {
  Criterion c(10, "pipeline emits Table-shaped outputs");
  // the published IPC numbers need the (undistributed) IPC series; gate only
  // that any ~2500-point close series flows through fit/gof/hist end to end
  const fs::path dir = fs::temp_directory_path() / "heavytail_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path csv = dir / "closes.csv";
  {
    const auto z = stable_sample(2502, kTable2Stable, RngStream{1010, 0});
    std::ofstream out(csv);
    out << "date,close\n";
    double close = 100.0;
    int y = 2000, m = 4, d = 1;
    for (std::size_t i = 0; i <= z.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d,%.8f\n", y, m, d, close);
      out << buf;
      if (++d > 28) { d = 1; if (++m > 12) { m = 1; ++y; } }
      if (i < z.size()) close *= std::exp(z[i]);
    }
  }
  RunConfig cfg;
  cfg.input_path = csv.string();
  cfg.output_dir = (dir / "out").string();
  cfg.bootstrap.replications = 150;
  cfg.bootstrap.inner_fit = InnerFit::fast_quantile;
  cfg.bootstrap.master_seed = 10;
  bool pass = cmd_fit(cfg) == kExitOk && cmd_gof(cfg) == kExitOk && cmd_hist(cfg) == kExitOk;
  pass = pass && fs::exists(dir / "out" / "fits.json") && fs::exists(dir / "out" / "gof.json") &&
         fs::exists(dir / "out" / "overlay.csv");
  std::string detail = "fits.json/gof.json/overlay.csv emitted from a 2502-close series";

  if (const char* ipc = std::getenv("HEAVYTAIL_IPC_CSV")) {
    // conditional (non-gating) check on independently obtained IPC data
    try {
      const ReturnSeries r = log_returns(load_prices_csv(ipc));
      const StableFitResult fitr = stable_fit_mle(r);
      detail += fmt(" | IPC conditional: alpha = %.4f (published 1.64 +-0.05: %s)",
                    fitr.params.alpha, std::abs(fitr.params.alpha - 1.64) <= 0.05 ? "ok" : "out");
    } catch (const std::exception& e) {
      detail += std::string(" | IPC conditional check errored: ") + e.what();
    }
  } else {
    detail += " | IPC check skipped (set HEAVYTAIL_IPC_CSV to run)";
  }
  c.result(pass, detail);
}

void criterion11_determinism() {
  Criterion c(11, "byte-identical reruns of gof and tailstudy");
  const fs::path dir = fs::temp_directory_path() / "heavytail_acceptance";
  const fs::path csv = dir / "closes.csv";  // written by criterion 10
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  RunConfig cfg;
  cfg.input_path = csv.string();
  cfg.bootstrap.replications = 150;
  cfg.bootstrap.inner_fit = InnerFit::fast_quantile;
  cfg.bootstrap.master_seed = 11;
  cfg.bootstrap.jobs = 2;
  cfg.output_dir = (dir / "d1").string();
  bool pass = cmd_gof(cfg) == kExitOk;
  cfg.output_dir = (dir / "d2").string();
  cfg.bootstrap.jobs = 1;
  pass = pass && cmd_gof(cfg) == kExitOk;
  pass = pass && slurp(dir / "d1" / "gof.json") == slurp(dir / "d2" / "gof.json");

  TailStudyConfig tcfg;
  tcfg.sizes = {1000, 2502};
  tcfg.seeds_per_size = 3;
  tcfg.master_seed = 11;
  tcfg.out_path = (dir / "t1.csv").string();
  pass = pass && cmd_tailstudy(tcfg) == kExitOk;
  tcfg.out_path = (dir / "t2.csv").string();
  tcfg.jobs = 1;
  pass = pass && cmd_tailstudy(tcfg) == kExitOk;
  pass = pass && slurp(dir / "t1.csv") == slurp(dir / "t2.csv");
  c.result(pass, "gof.json and tailstudy csv identical across reruns and worker counts");
}

}  // namespace

int main() {
  std::printf("heavytail acceptance suite\n");
  criterion1_closed_forms();
  criterion2_normalization();
  criterion3_tail_slope();
  criterion4_sampler_fidelity();
  criterion5_fit_recovery();
  criterion6_gaussian_limit();
  criterion7_stable_limit();
  criterion8_tail_study();
  criterion9_null_calibration();
  criterion10_pipeline_shape();
  criterion11_determinism();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
