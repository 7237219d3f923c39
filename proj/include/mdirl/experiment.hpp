#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdirl/config.hpp"
#include "mdirl/record.hpp"
#include "mdirl/schedule.hpp"

namespace mdirl {

struct SeedResult {
  int seed = 0;
  bool failed = false;
  std::string failure;  // reason when the run aborted (e.g. inadmissible step)
  double final_d_agent = 0.0;
  double final_d_ref = 0.0;
  double final_regret = 0.0;
  // final divergence of the eta == 1 direct-chase baseline (bandit runs)
  std::optional<double> baseline_final_d;
  std::vector<RunRecord> records;
};

struct ResultSummary {
  ExperimentConfig cfg;
  std::vector<SeedResult> per_seed;
  double mean_final = 0.0;
  double std_final = 0.0;
  double mean_final_ref = 0.0;
  std::optional<double> baseline_mean_final;
  std::vector<std::pair<std::string, bool>> verdicts;
  std::vector<std::string> csv_paths;
  std::string summary_path;
};

// In-memory single-seed runs; no files are written. The baseline flag on the
// bandit run replays the same environment stream with eta == 1.
SeedResult run_bandit_seed(const ExperimentConfig& cfg, const StepSchedule& sched,
                           int seed, bool with_baseline = true);
SeedResult run_gaussian_toy_seed(const ExperimentConfig& cfg, const StepSchedule& sched,
                                 int seed);
SeedResult run_mdp_seed(const ExperimentConfig& cfg, const StepSchedule& sched, int seed);

// Runs every configured seed (concurrently), writes one CSV per seed plus a
// summary JSON into cfg.output_dir, and returns the merged summary.
ResultSummary run_experiment(const ExperimentConfig& cfg);

struct SweepCell {
  double eta1 = 0.0;
  double etaT = 0.0;
  double mean_final = 0.0;
  double std_final = 0.0;
  int failures = 0;
  std::vector<double> finals;  // per successful trial
};

struct SweepResult {
  ExperimentConfig cfg;
  std::vector<SweepCell> cells;
  std::string csv_path;
  std::string summary_path;
};

// Gaussian-toy sweep over (eta_1, eta_T) cells using the linear-alpha
// schedule; every cell runs all configured seeds.
SweepResult schedule_sweep(const ExperimentConfig& cfg);

// In-memory variant of one sweep cell.
SweepCell run_sweep_cell(const ExperimentConfig& cfg, double eta1, double etaT);

}  // namespace mdirl
