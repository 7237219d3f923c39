#pragma once

#include <optional>
#include <vector>

#include "mdirl/bregman.hpp"

namespace mdirl {

// One probability row per state.
class TabularPolicy {
 public:
  explicit TabularPolicy(std::vector<ProbVector> rows);
  static TabularPolicy uniform(int num_states, int num_actions);

  int num_states() const { return static_cast<int>(rows_.size()); }
  int num_actions() const { return rows_.empty() ? 0 : rows_[0].size(); }
  const ProbVector& row(int s) const { return rows_[s]; }
  void set_row(int s, ProbVector p);

 private:
  std::vector<ProbVector> rows_;
};

struct MdStepResult {
  TabularPolicy policy;
  bool clamped = false;            // any state hit a clamp or saturation
  double max_dual_residual = 0.0;  // dual-step identity residual over
                                   // unclamped states (tangent component)
};

// Per state: grad_omega_star(eta * grad(pi_bar) + (1 - eta) * grad(pi_t)).
// The minimizer of eta D(.||pi_bar) + (1-eta) D(.||pi_t) over the clamped
// simplex. eta > 1 extrapolates in the dual and may activate clamps.
MdStepResult md_step_tabular(const TabularPolicy& pi_t, const TabularPolicy& pi_bar,
                             double eta, const Regularizer& reg,
                             double eps = kEpsMin);

// sum_i gamma^i D(pi(.|s_i) || pi_bar(.|s_i)) along the trajectory.
double temporal_cost(const TabularPolicy& pi, const TabularPolicy& pi_bar,
                     const std::vector<int>& trajectory, double gamma,
                     const Regularizer& reg);

// Horizon at which the geometric tail of a discounted sum drops below
// tail_tol * D_max / (1 - gamma).
int discounted_horizon(double gamma, double tail_tol = 1e-6);

struct HistoryEntry {
  TabularPolicy policy;     // pi_i played in round i
  TabularPolicy reference;  // pi_bar_{E,i} estimated in round i
  std::vector<int> trajectory;
};

// Dual-averaged empirical fixed point: per state,
// grad_omega_star(mean_j grad_omega(reference_j)).
TabularPolicy regret_comparator(const std::vector<HistoryEntry>& history,
                                const Regularizer& reg, double eps = kEpsMin);

// (1/t) sum_i f(pi_i, tau_i) - (1/t) sum_j f(comparator, tau_j) with the
// temporal cost f; the comparator defaults to the dual-averaged fixed point.
double regret(const std::vector<HistoryEntry>& history, double gamma,
              const Regularizer& reg,
              const std::optional<TabularPolicy>& comparator = std::nullopt,
              double eps = kEpsMin);

// reward(s, a) = lambda * psi(s, a) + ln(rho_e(s) / rho_theta(s)), densities
// clamped at 1e-12.
std::vector<DualVector> psi_lambda_reward(const std::vector<DualVector>& psi,
                                          const Eigen::VectorXd& rho_e,
                                          const Eigen::VectorXd& rho_theta,
                                          double lambda);

// Mean subtraction by a running exponential moving average, initialized at
// the first observed value.
class RewardNormalizer {
 public:
  explicit RewardNormalizer(double momentum);
  double process(double reward);
  double mean() const { return mean_; }

 private:
  double momentum_;
  double mean_ = 0.0;
  bool initialized_ = false;
};

// Per-state grad_omega_star: the unique regularized-RL optimum of psi.
TabularPolicy exact_regularized_rl(const std::vector<DualVector>& psi,
                                   const Regularizer& reg, double eps = kEpsMin);

// Weighted proximal loss
//   L = sum_s w_s [ eta D(pi_phi^s || pi_nu^s) + (1-eta) D(pi_phi^s || pi_theta^s) ].
double mdairl_loss(const TabularPolicy& pi_phi, const TabularPolicy& pi_nu,
                   const TabularPolicy& pi_theta, double eta,
                   const Eigen::VectorXd& state_weights, const Regularizer& reg);

// Exact minimizer of the proximal loss, found by projected gradient descent
// on each state's loss in the primal simplex (independent of the dual
// interpolation route used by md_step_tabular).
TabularPolicy mdairl_minimizer(const TabularPolicy& pi_nu,
                               const TabularPolicy& pi_theta, double eta,
                               const Regularizer& reg, double eps = kEpsMin);

}  // namespace mdirl
