#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heavytail/gof.hpp"
#include "heavytail/nig.hpp"
#include "heavytail/stable.hpp"
#include "heavytail/tail.hpp"

namespace heavytail {

inline constexpr std::uint64_t kDefaultSeed = 42;  // fixed default keeps runs reproducible

struct RunConfig {
  std::string input_path;
  std::vector<std::string> models = {"gaussian", "stable", "nig"};
  BootstrapConfig bootstrap;
  std::string output_dir = ".";
  int histogram_bins = 50;

  void validate() const;  // models nonempty and known; histogram_bins >= 10
};

struct TailStudyConfig {
  StableParams params{1.7, 0.0, 1.0, 0.0};
  std::vector<std::size_t> sizes = {1000, 2502, 10000, 100000, 1000000};
  int seeds_per_size = 20;
  std::uint64_t master_seed = kDefaultSeed;
  int jobs = 0;
  std::string out_path = "tailstudy.csv";
};

struct SimulateConfig {
  std::string model = "stable";  // "stable" or "nig"
  std::size_t n = 1000;
  StableParams stable_params{1.7, 0.0, 1.0, 0.0};
  NigParams nig_params{1.0, 0.0, 1.0, 0.0};
  std::uint64_t seed = kDefaultSeed;
  std::string out_path = "sample.csv";
};

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputational = 1;
inline constexpr int kExitUsage = 2;

int cmd_fit(const RunConfig& cfg);        // <out>/fits.json
int cmd_gof(const RunConfig& cfg);        // <out>/gof.json plus a verdict table on stdout
int cmd_tailstudy(const TailStudyConfig& cfg);
int cmd_hist(const RunConfig& cfg);       // <out>/overlay.csv
int cmd_simulate(const SimulateConfig& cfg);

/// Serialization used by the commands (exposed so tests can parse round-trip).
std::string gof_reports_to_json(const std::vector<GofReport>& reports);
std::string tail_study_to_csv(const TailStudyResult& result);

}  // namespace heavytail
