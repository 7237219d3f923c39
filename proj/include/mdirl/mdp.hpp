#pragma once

#include <vector>

#include "mdirl/rng.hpp"
#include "mdirl/tabular.hpp"

namespace mdirl {

// Finite MDP: transition rows P[s][a] over next states, initial distribution
// mu0, discount gamma.
struct TabularMdpSpec {
  int num_states = 0;
  int num_actions = 0;
  std::vector<std::vector<Eigen::VectorXd>> transition;  // [s][a] -> next-state probs
  Eigen::VectorXd mu0;
  double gamma = 0.9;

  void validate() const;

  // 5x5 gridworld, 4 actions (up/right/down/left), slip probability split
  // between the two perpendicular moves, uniform start distribution.
  static TabularMdpSpec gridworld(int side = 5, double slip = 0.1, double gamma = 0.9);
};

// Discounted state visitation rho solving rho = (1-gamma) mu0 + gamma P_pi^T rho.
Eigen::VectorXd visitation_density(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                                   double gamma);

// Markov-chain simulation; returns horizon+1 states starting from mu0.
std::vector<int> rollout(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                         int horizon, Rng& rng);

struct Trajectory {
  std::vector<int> states;   // horizon + 1 entries
  std::vector<int> actions;  // horizon entries, actions[i] taken at states[i]
};

Trajectory rollout_with_actions(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                                int horizon, Rng& rng);

// State frequencies of the (1-gamma)-restarted chain over `steps` transitions;
// converges to the discounted visitation density.
Eigen::VectorXd empirical_visitation(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                                     double gamma, long steps, Rng& rng);

}  // namespace mdirl
