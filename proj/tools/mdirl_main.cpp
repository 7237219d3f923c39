#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mdirl/config.hpp"
#include "mdirl/experiment.hpp"
#include "mdirl/record.hpp"
#include "mdirl/verify.hpp"

namespace {

int run(const mdirl::ExperimentConfig& cfg) {
  using mdirl::ExperimentKind;
  if (cfg.kind == ExperimentKind::verify) {
    const mdirl::VerifyReport report = mdirl::verify_suite();
    std::cout << report.to_string();
    return report.all_pass() ? 0 : 2;
  }
  if (cfg.kind == ExperimentKind::schedule_sweep) {
    const mdirl::SweepResult result = mdirl::schedule_sweep(cfg);
    std::cout << "schedule sweep (" << cfg.regularizer << ", "
              << cfg.seeds.size() << " trials, T=" << cfg.total_steps << ")\n";
    for (const auto& c : result.cells) {
      std::cout << "  (eta1=" << c.eta1 << ", etaT=" << c.etaT << ")  ";
      if (c.finals.empty())
        std::cout << "-";
      else
        std::cout << c.mean_final << " +- " << c.std_final;
      if (c.failures > 0) std::cout << "  [" << c.failures << " failed]";
      std::cout << "\n";
    }
    std::cout << "wrote " << result.csv_path << " and " << result.summary_path << "\n";
    return 0;
  }
  const mdirl::ResultSummary summary = mdirl::run_experiment(cfg);
  std::cout << mdirl::to_string(cfg.kind) << " (" << cfg.regularizer << ", "
            << cfg.schedule << ")\n";
  for (const auto& r : summary.per_seed) {
    std::cout << "  seed " << r.seed << ": ";
    if (r.failed)
      std::cout << "FAILED (" << r.failure << ")";
    else
      std::cout << "final D(pi_T||pi_E) = " << r.final_d_agent
                << ", D(ref_T||pi_E) = " << r.final_d_ref;
    std::cout << "\n";
  }
  std::cout << "  mean final divergence: " << summary.mean_final << " +- "
            << summary.std_final << "\n";
  if (summary.baseline_mean_final)
    std::cout << "  eta==1 baseline mean: " << *summary.baseline_mean_final << "\n";
  for (const auto& [name, pass] : summary.verdicts)
    std::cout << "  verdict " << name << ": " << (pass ? "yes" : "no") << "\n";
  std::cout << "wrote " << summary.summary_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mirror-descent IRL experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<int> seeds;
  int steps = -1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--seed", seeds, "seed(s), overrides the config");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--steps", steps, "total steps, overrides the config");
  };
  for (const char* name :
       {"bandit", "gaussian_toy", "mdp", "schedule_sweep", "verify"}) {
    add_common(app.add_subcommand(name));
  }

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    mdirl::ExperimentConfig cfg =
        config_path.empty()
            ? mdirl::ExperimentConfig::defaults(mdirl::experiment_kind_from_string(sub))
            : mdirl::ExperimentConfig::parse_file(config_path);
    if (!config_path.empty() && mdirl::to_string(cfg.kind) != sub) {
      std::cerr << "config error at experiment.kind: config says "
                << mdirl::to_string(cfg.kind) << " but subcommand is " << sub << "\n";
      return 1;
    }
    if (!seeds.empty()) cfg.seeds = seeds;
    if (steps > 0) {
      cfg.total_steps = steps;
      // keep a linear-alpha horizon consistent with the requested length
      if (cfg.schedule.rfind("linear_alpha:", 0) == 0) {
        const auto sched = mdirl::StepSchedule::parse(cfg.schedule);
        const double eta1 = sched.eta(1);
        const double etaT = sched.eta(sched.total_steps());
        cfg.schedule = mdirl::StepSchedule::linear_alpha(1.0 / eta1, 1.0 / etaT,
                                                         cfg.total_steps)
                           .to_string();
      }
    }
    if (!out_dir.empty()) {
      cfg.output_dir = out_dir;
    } else if (const char* env = std::getenv("MDIRL_OUT"); env && *env) {
      cfg.output_dir = env;
    }
    cfg.validate();
    return run(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
