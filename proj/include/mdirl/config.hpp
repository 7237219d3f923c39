#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mdirl {

enum class ExperimentKind { bandit, gaussian_toy, mdp, schedule_sweep, verify };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Flat key-value configuration with one [experiment] section plus a section
// of knobs for the selected experiment. Unknown keys are rejected with the
// offending field path.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::bandit;
  std::string regularizer = "shannon";
  std::string schedule = "constant:0.5";
  std::vector<int> seeds = {1, 2, 3, 4, 5};
  int total_steps = 100;
  int samples_per_round = 16;
  double lambda = 1.0;
  double gamma = 0.0;
  double noise_epsilon = 0.0;
  std::string output_dir = "out";

  // bandit
  int num_actions = 100;
  double smoothing = 0.1;
  double logit_scale = 1.0;
  double reference_lr = 0.2;

  // mdp
  int grid_side = 5;
  double slip = 0.1;
  double mix_ratio = 0.5;

  // schedule_sweep: list of (eta_1, eta_T) cells
  std::vector<std::pair<double, double>> sweep_grid = {{1.0, 0.1}, {1.0, 1.0}};

  static ExperimentConfig defaults(ExperimentKind kind);
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
  std::string serialize() const;

  // Throws std::invalid_argument with a field path on violation.
  void validate() const;

  bool operator==(const ExperimentConfig& o) const = default;
};

}  // namespace mdirl
