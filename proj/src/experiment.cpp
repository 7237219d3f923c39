#include "mdirl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "mdirl/bregman.hpp"
#include "mdirl/diagnostics.hpp"
#include "mdirl/environments.hpp"
#include "mdirl/mdp.hpp"
#include "mdirl/tabular.hpp"

namespace mdirl {

namespace {

using nlohmann::json;

// Running average regret against the dual-averaged comparator; per-round
// reference statistics are cached so each update costs O(S*A).
class RegretTracker {
 public:
  RegretTracker(int num_states, int num_actions, double gamma, Regularizer reg)
      : S_(num_states),
        A_(num_actions),
        gamma_(gamma),
        reg_(std::move(reg)),
        gsum_(num_states, DualVector::Zero(num_actions)),
        wg_(num_states, DualVector::Zero(num_actions)),
        wsum_(Eigen::VectorXd::Zero(num_states)),
        womega_(Eigen::VectorXd::Zero(num_states)),
        wip_(Eigen::VectorXd::Zero(num_states)) {}

  void add_round(const TabularPolicy& played, const TabularPolicy& reference,
                 const std::vector<int>& trajectory) {
    ++rounds_;
    realized_ += temporal_cost(played, reference, trajectory, gamma_, reg_);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(S_);
    double g = 1.0;
    for (const int s : trajectory) {
      w(s) += g;
      g *= gamma_;
      if (g == 0.0) break;
    }
    for (int s = 0; s < S_; ++s) {
      const DualVector gr = grad_omega(reference.row(s), reg_);
      gsum_[s] += gr;
      if (w(s) > 0.0) {
        wsum_(s) += w(s);
        womega_(s) += w(s) * omega(reference.row(s), reg_);
        wg_[s] += w(s) * gr;
        wip_(s) += w(s) * gr.dot(reference.row(s).vec());
      }
    }
  }

  // Average realized cost minus the comparator's average cost so far.
  double regret() const {
    double best = 0.0;
    for (int s = 0; s < S_; ++s) {
      if (wsum_(s) == 0.0) continue;
      const ProbVector star =
          grad_omega_star(gsum_[s] / static_cast<double>(rounds_), reg_);
      best += wsum_(s) * omega(star, reg_) - womega_(s) - wg_[s].dot(star.vec()) +
              wip_(s);
    }
    return (realized_ - best) / static_cast<double>(rounds_);
  }

 private:
  int S_, A_;
  double gamma_;
  Regularizer reg_;
  long rounds_ = 0;
  double realized_ = 0.0;
  std::vector<DualVector> gsum_;
  std::vector<DualVector> wg_;
  Eigen::VectorXd wsum_, womega_, wip_;
};

std::string sanitize(const std::string& s) {
  std::string out;
  for (const char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (const double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

SeedResult run_bandit_seed(const ExperimentConfig& cfg, const StepSchedule& sched,
                           int seed, bool with_baseline) {
  const Regularizer reg = Regularizer::parse(cfg.regularizer);

  const auto run_once = [&](const StepSchedule& s) {
    Rng env_rng(static_cast<std::uint64_t>(seed));
    const BanditSpec spec = BanditSpec::make(cfg.num_actions, env_rng,
                                             cfg.samples_per_round, cfg.smoothing,
                                             cfg.logit_scale);
    const ProbVector pi_e = spec.expert_policy();
    TabularPolicy expert({pi_e});
    TabularPolicy pi = TabularPolicy::uniform(1, cfg.num_actions);
    TabularPolicy ref = pi;
    RegretTracker tracker(1, cfg.num_actions, 0.0, reg);
    std::vector<RunRecord> records;
    records.reserve(cfg.total_steps);
    for (int t = 1; t <= cfg.total_steps; ++t) {
      const double eta = s.eta(t);
      const std::vector<int> batch = sample_expert_bandit(spec, env_rng);
      ref.set_row(0, fit_reference_discrete(ref.row(0), batch, cfg.num_actions,
                                            cfg.smoothing, cfg.reference_lr));
      tracker.add_round(pi, ref, {0});
      const MdStepResult step = md_step_tabular(pi, ref, eta, reg);
      pi = step.policy;
      RunRecord rec;
      rec.t = t;
      rec.eta = eta;
      rec.d_agent_expert = bregman_div(pi.row(0), pi_e, reg);
      rec.d_ref_expert = bregman_div(ref.row(0), pi_e, reg);
      rec.regret = tracker.regret();
      rec.clamped = step.clamped;
      records.push_back(std::move(rec));
    }
    return records;
  };

  SeedResult out;
  out.seed = seed;
  out.records = run_once(sched);
  out.final_d_agent = out.records.back().d_agent_expert;
  out.final_d_ref = out.records.back().d_ref_expert;
  out.final_regret = out.records.back().regret;
  if (with_baseline) {
    const auto baseline = run_once(StepSchedule::constant(1.0));
    out.baseline_final_d = baseline.back().d_agent_expert;
  }
  return out;
}

SeedResult run_gaussian_toy_seed(const ExperimentConfig& cfg, const StepSchedule& sched,
                                 int seed) {
  const Regularizer reg = Regularizer::parse(cfg.regularizer);
  if (reg.kind() != RegKind::shannon && reg.kind() != RegKind::tsallis)
    throw std::invalid_argument(
        "gaussian_toy: only shannon and tsallis regularizers have Gaussian closed forms");

  const GaussianToySpec spec =
      GaussianToySpec::make(cfg.reference_lr, cfg.samples_per_round);
  const NoiseSpec noise{cfg.noise_epsilon};
  Rng env_rng(static_cast<std::uint64_t>(seed));

  GaussianPolicyParams agent = GaussianPolicyParams::standard(spec.dim);
  GaussianPolicyParams ref = agent;  // reference starts at the agent init

  SeedResult out;
  out.seed = seed;
  out.records.reserve(cfg.total_steps);
  for (int t = 1; t <= cfg.total_steps; ++t) {
    const double eta = sched.eta(t);
    std::vector<Eigen::VectorXd> batch;
    batch.reserve(spec.samples_per_round);
    for (int i = 0; i < spec.samples_per_round; ++i)
      batch.push_back(sample_action(spec.expert, env_rng));
    batch = corrupt_demos(std::move(batch), noise, env_rng);
    ref = fit_reference_gaussian(ref, batch, spec.reference_lr);
    try {
      agent = md_update_gaussian(agent, ref, eta, reg);
    } catch (const std::exception& e) {
      out.failed = true;
      out.failure = e.what();
      break;
    }
    RunRecord rec;
    rec.t = t;
    rec.eta = eta;
    rec.d_agent_expert = bregman_div_gaussian(agent, spec.expert, reg);
    rec.d_ref_expert = bregman_div_gaussian(ref, spec.expert, reg);
    rec.regret = 0.0;  // regret tracking is defined for the discrete runs
    out.records.push_back(std::move(rec));
  }
  if (!out.records.empty()) {
    out.final_d_agent = out.records.back().d_agent_expert;
    out.final_d_ref = out.records.back().d_ref_expert;
  }
  return out;
}

SeedResult run_mdp_seed(const ExperimentConfig& cfg, const StepSchedule& sched,
                        int seed) {
  const Regularizer reg = Regularizer::parse(cfg.regularizer);
  const TabularMdpSpec mdp = TabularMdpSpec::gridworld(cfg.grid_side, cfg.slip, cfg.gamma);
  const int S = mdp.num_states, A = mdp.num_actions;
  Rng env_rng(static_cast<std::uint64_t>(seed));

  std::vector<ProbVector> expert_rows;
  expert_rows.reserve(S);
  for (int s = 0; s < S; ++s) {
    const Eigen::VectorXd logits = cfg.logit_scale * env_rng.normal_vec(A);
    expert_rows.push_back(
        ProbVector::from_weights((logits.array() - logits.maxCoeff()).exp()));
  }
  const TabularPolicy pi_e(expert_rows);

  TabularPolicy pi = TabularPolicy::uniform(S, A);
  TabularPolicy ref = pi;
  const int horizon = discounted_horizon(cfg.gamma);
  RegretTracker tracker(S, A, cfg.gamma, reg);
  RewardNormalizer normalizer(0.99);

  SeedResult out;
  out.seed = seed;
  out.records.reserve(cfg.total_steps);
  for (int t = 1; t <= cfg.total_steps; ++t) {
    const double eta = sched.eta(t);

    // expert demonstrations refresh the per-state reference estimate
    const auto demo = rollout_with_actions(mdp, pi_e, horizon, env_rng);
    std::vector<std::vector<int>> state_batches(S);
    for (size_t i = 0; i < demo.actions.size(); ++i)
      state_batches[demo.states[i]].push_back(demo.actions[i]);
    for (int s = 0; s < S; ++s) {
      if (!state_batches[s].empty())
        ref.set_row(s, fit_reference_discrete(ref.row(s), state_batches[s], A,
                                              cfg.smoothing, cfg.reference_lr));
    }

    const std::vector<int> tau = rollout(mdp, pi, horizon, env_rng);
    tracker.add_round(pi, ref, tau);

    const MdStepResult step = md_step_tabular(pi, ref, eta, reg);

    // composite reward and the exact RL step it induces
    std::vector<DualVector> psi;
    psi.reserve(S);
    for (int s = 0; s < S; ++s)
      psi.push_back(reward_operator_psi(step.policy.row(s), reg));
    const Eigen::VectorXd rho_theta = visitation_density(mdp, pi, cfg.gamma);
    const Eigen::VectorXd rho_ref = visitation_density(mdp, ref, cfg.gamma);
    std::vector<DualVector> reward =
        psi_lambda_reward(psi, rho_ref, rho_theta, cfg.lambda);
    double mean_reward = 0.0;
    for (const auto& r : reward) mean_reward += r.mean();
    mean_reward /= static_cast<double>(S);
    normalizer.process(mean_reward);
    for (auto& r : reward) r.array() -= normalizer.mean();
    for (auto& r : reward) r /= cfg.lambda;  // RL regularized by lambda*Omega
    const TabularPolicy pi_theta = exact_regularized_rl(reward, reg);

    double rl_md_gap = 0.0;
    for (int s = 0; s < S; ++s)
      rl_md_gap = std::max(rl_md_gap, (pi_theta.row(s).vec() -
                                       step.policy.row(s).vec()).cwiseAbs().maxCoeff());

    // Eq.15-style loss at the minimizer under mixed expert/agent state weights
    Eigen::VectorXd w_mixed = Eigen::VectorXd::Zero(S);
    double g = 1.0;
    for (size_t i = 0; i < demo.states.size(); ++i) {
      w_mixed(demo.states[i]) += cfg.mix_ratio * g;
      g *= cfg.gamma;
    }
    g = 1.0;
    for (const int s : tau) {
      w_mixed(s) += (1.0 - cfg.mix_ratio) * g;
      g *= cfg.gamma;
    }
    if (w_mixed.sum() > 0.0) w_mixed /= w_mixed.sum();

    RunRecord rec;
    rec.t = t;
    rec.eta = eta;
    rec.d_agent_expert = temporal_cost(step.policy, pi_e, tau, cfg.gamma, reg);
    rec.d_ref_expert = temporal_cost(ref, pi_e, tau, cfg.gamma, reg);
    rec.regret = tracker.regret();
    rec.clamped = step.clamped;
    rec.aux["rl_md_gap"] = rl_md_gap;
    rec.aux["mdairl_loss"] = mdairl_loss(step.policy, ref, pi, eta, w_mixed, reg);
    out.records.push_back(std::move(rec));

    pi = step.policy;
  }
  out.final_d_agent = out.records.back().d_agent_expert;
  out.final_d_ref = out.records.back().d_ref_expert;
  out.final_regret = out.records.back().regret;
  return out;
}

namespace {

SeedResult run_seed_dispatch(const ExperimentConfig& cfg, int seed) {
  const StepSchedule sched = StepSchedule::parse(cfg.schedule);
  switch (cfg.kind) {
    case ExperimentKind::bandit:
      return run_bandit_seed(cfg, sched, seed);
    case ExperimentKind::gaussian_toy:
      return run_gaussian_toy_seed(cfg, sched, seed);
    case ExperimentKind::mdp:
      return run_mdp_seed(cfg, sched, seed);
    default:
      throw std::invalid_argument("run_experiment: unsupported experiment kind");
  }
}

json seed_to_json(const SeedResult& r) {
  json j;
  j["seed"] = r.seed;
  j["failed"] = r.failed;
  if (r.failed) j["failure"] = r.failure;
  j["final_d_agent"] = r.final_d_agent;
  j["final_d_ref"] = r.final_d_ref;
  j["final_regret"] = r.final_regret;
  if (r.baseline_final_d) j["baseline_final_d"] = *r.baseline_final_d;
  return j;
}

}  // namespace

ResultSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind == ExperimentKind::schedule_sweep || cfg.kind == ExperimentKind::verify)
    throw std::invalid_argument(
        "run_experiment: use schedule_sweep() / verify_suite() for this kind");

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw std::runtime_error("unwritable output dir: " + cfg.output_dir);

  ResultSummary summary;
  summary.cfg = cfg;

  std::vector<std::future<SeedResult>> futures;
  futures.reserve(cfg.seeds.size());
  for (const int seed : cfg.seeds) {
    futures.push_back(std::async(std::launch::async,
                                 [&cfg, seed] { return run_seed_dispatch(cfg, seed); }));
  }
  for (auto& f : futures) summary.per_seed.push_back(f.get());

  const std::string stem = std::string(to_string(cfg.kind)) + "_" + sanitize(cfg.regularizer);
  std::vector<double> finals, finals_ref, baselines;
  for (const auto& r : summary.per_seed) {
    const std::string path =
        (fs::path(cfg.output_dir) / (stem + "_seed" + std::to_string(r.seed) + ".csv"))
            .string();
    write_csv(path, r.records);
    summary.csv_paths.push_back(path);
    if (!r.failed) {
      finals.push_back(r.final_d_agent);
      finals_ref.push_back(r.final_d_ref);
      if (r.baseline_final_d) baselines.push_back(*r.baseline_final_d);
    }
  }
  if (!finals.empty()) {
    summary.mean_final = 0.0;
    for (const double v : finals) summary.mean_final += v;
    summary.mean_final /= static_cast<double>(finals.size());
    summary.std_final = sample_std(finals, summary.mean_final);
    summary.mean_final_ref = 0.0;
    for (const double v : finals_ref) summary.mean_final_ref += v;
    summary.mean_final_ref /= static_cast<double>(finals_ref.size());
  }
  if (!baselines.empty()) {
    double b = 0.0;
    for (const double v : baselines) b += v;
    summary.baseline_mean_final = b / static_cast<double>(baselines.size());
  }

  summary.verdicts.emplace_back("md_final_below_reference",
                                summary.mean_final < summary.mean_final_ref);
  if (summary.baseline_mean_final) {
    summary.verdicts.emplace_back("md_beats_direct_baseline",
                                  summary.mean_final <= *summary.baseline_mean_final);
  }
  if (cfg.total_steps >= 50 && !summary.per_seed.empty() &&
      !summary.per_seed.front().failed) {
    // convergence of the seed-averaged divergence series
    std::vector<double> avg(cfg.total_steps, 0.0);
    int used = 0;
    for (const auto& r : summary.per_seed) {
      if (r.failed || static_cast<int>(r.records.size()) != cfg.total_steps) continue;
      for (int t = 0; t < cfg.total_steps; ++t) avg[t] += r.records[t].d_agent_expert;
      ++used;
    }
    if (used > 0) {
      for (auto& v : avg) v /= used;
      DiagnosticOptions opts;
      opts.convergence_ratio = 0.5;
      const auto rep = convergence_diagnostics(avg, DiagnosticMode::proposition1, opts);
      summary.verdicts.emplace_back("final_window_below_half_initial", rep.pass);
    }
  }

  json j;
  j["config_text"] = cfg.serialize();
  j["experiment"] = to_string(cfg.kind);
  j["regularizer"] = cfg.regularizer;
  j["schedule"] = cfg.schedule;
  j["total_steps"] = cfg.total_steps;
  j["seeds"] = cfg.seeds;
  j["per_seed"] = json::array();
  for (const auto& r : summary.per_seed) j["per_seed"].push_back(seed_to_json(r));
  j["mean_final"] = summary.mean_final;
  j["std_final"] = summary.std_final;
  j["mean_final_ref"] = summary.mean_final_ref;
  if (summary.baseline_mean_final) j["baseline_mean_final"] = *summary.baseline_mean_final;
  j["verdicts"] = json::object();
  for (const auto& [name, pass] : summary.verdicts) j["verdicts"][name] = pass;
  j["csv_files"] = summary.csv_paths;

  summary.summary_path = (fs::path(cfg.output_dir) / (stem + "_summary.json")).string();
  std::ofstream out(summary.summary_path, std::ios::binary);
  if (!out) throw std::runtime_error("unwritable output dir: " + cfg.output_dir);
  out << j.dump(2) << "\n";
  return summary;
}

SweepCell run_sweep_cell(const ExperimentConfig& cfg, double eta1, double etaT) {
  SweepCell cell;
  cell.eta1 = eta1;
  cell.etaT = etaT;
  const StepSchedule sched =
      StepSchedule::linear_alpha(1.0 / eta1, 1.0 / etaT, cfg.total_steps);
  for (const int seed : cfg.seeds) {
    const SeedResult r = run_gaussian_toy_seed(cfg, sched, seed);
    if (r.failed) {
      ++cell.failures;
    } else {
      cell.finals.push_back(r.final_d_agent);
    }
  }
  if (!cell.finals.empty()) {
    for (const double v : cell.finals) cell.mean_final += v;
    cell.mean_final /= static_cast<double>(cell.finals.size());
    cell.std_final = sample_std(cell.finals, cell.mean_final);
  } else {
    cell.mean_final = std::nan("");
    cell.std_final = std::nan("");
  }
  return cell;
}

SweepResult schedule_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_grid.empty())
    throw std::invalid_argument("schedule_sweep: empty grid");

  SweepResult result;
  result.cfg = cfg;

  std::vector<std::future<SweepCell>> futures;
  futures.reserve(cfg.sweep_grid.size());
  for (const auto& [eta1, etaT] : cfg.sweep_grid) {
    futures.push_back(std::async(std::launch::async, [&cfg, eta1 = eta1, etaT = etaT] {
      return run_sweep_cell(cfg, eta1, etaT);
    }));
  }
  for (auto& f : futures) result.cells.push_back(f.get());

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw std::runtime_error("unwritable output dir: " + cfg.output_dir);
  const std::string stem = "schedule_sweep_" + sanitize(cfg.regularizer);
  result.csv_path = (fs::path(cfg.output_dir) / (stem + ".csv")).string();
  std::ofstream out(result.csv_path, std::ios::binary);
  if (!out) throw std::runtime_error("unwritable output dir: " + cfg.output_dir);
  out << "eta1,etaT,mean_final,std_final,failures,trials\n";
  for (const auto& c : result.cells) {
    out << format_double(c.eta1) << ',' << format_double(c.etaT) << ','
        << format_double(c.mean_final) << ',' << format_double(c.std_final) << ','
        << c.failures << ',' << cfg.seeds.size() << "\n";
  }
  out.close();

  json j;
  j["config_text"] = cfg.serialize();
  j["regularizer"] = cfg.regularizer;
  j["trials"] = cfg.seeds.size();
  j["cells"] = json::array();
  for (const auto& c : result.cells) {
    json cj;
    cj["eta1"] = c.eta1;
    cj["etaT"] = c.etaT;
    if (std::isnan(c.mean_final)) {
      cj["mean_final"] = nullptr;
      cj["std_final"] = nullptr;
    } else {
      cj["mean_final"] = c.mean_final;
      cj["std_final"] = c.std_final;
    }
    cj["failures"] = c.failures;
    j["cells"].push_back(cj);
  }
  result.summary_path = (fs::path(cfg.output_dir) / (stem + "_summary.json")).string();
  std::ofstream sout(result.summary_path, std::ios::binary);
  sout << j.dump(2) << "\n";
  return result;
}

}  // namespace mdirl
