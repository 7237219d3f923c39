#include "mdirl/mdp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mdirl {

void TabularMdpSpec::validate() const {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("TabularMdpSpec: empty state or action space");
  if (static_cast<int>(transition.size()) != num_states)
    throw std::invalid_argument("TabularMdpSpec: transition row count mismatch");
  for (const auto& row : transition) {
    if (static_cast<int>(row.size()) != num_actions)
      throw std::invalid_argument("TabularMdpSpec: transition action count mismatch");
    for (const auto& next : row) {
      if (next.size() != num_states)
        throw std::invalid_argument("TabularMdpSpec: next-state vector length mismatch");
      if (std::abs(next.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("TabularMdpSpec: transition row does not sum to 1");
    }
  }
  if (mu0.size() != num_states || std::abs(mu0.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("TabularMdpSpec: bad initial distribution");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("TabularMdpSpec: gamma must be in [0, 1)");
}

TabularMdpSpec TabularMdpSpec::gridworld(int side, double slip, double gamma) {
  const int S = side * side;
  const int A = 4;  // up, right, down, left
  const int dr[4] = {-1, 0, 1, 0};
  const int dc[4] = {0, 1, 0, -1};

  TabularMdpSpec mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.gamma = gamma;
  mdp.mu0 = Eigen::VectorXd::Constant(S, 1.0 / S);
  mdp.transition.assign(S, std::vector<Eigen::VectorXd>(A));

  const auto move = [&](int s, int a) {
    const int r = s / side, c = s % side;
    const int nr = r + dr[a], nc = c + dc[a];
    if (nr < 0 || nr >= side || nc < 0 || nc >= side) return s;  // wall: stay
    return nr * side + nc;
  };

  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      Eigen::VectorXd next = Eigen::VectorXd::Zero(S);
      next(move(s, a)) += 1.0 - slip;
      // slip to one of the two perpendicular directions
      next(move(s, (a + 1) % 4)) += slip / 2.0;
      next(move(s, (a + 3) % 4)) += slip / 2.0;
      mdp.transition[s][a] = next;
    }
  }
  return mdp;
}

Eigen::VectorXd visitation_density(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                                   double gamma) {
  mdp.validate();
  if (pi.num_states() != mdp.num_states || pi.num_actions() != mdp.num_actions)
    throw std::invalid_argument("visitation_density: policy shape mismatch");
  const int S = mdp.num_states;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);  // P(s, s') under pi
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      P.row(s) += pi.row(s)[a] * mdp.transition[s][a].transpose();

  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(S, S) - gamma * P.transpose();
  Eigen::VectorXd rho = A.partialPivLu().solve((1.0 - gamma) * mdp.mu0);
  const double residual = (A * rho - (1.0 - gamma) * mdp.mu0).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw std::runtime_error("visitation_density: linear solve residual too large");
  return rho;
}

std::vector<int> rollout(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                         int horizon, Rng& rng) {
  std::vector<int> states;
  states.reserve(horizon + 1);
  int s = rng.categorical(mdp.mu0);
  states.push_back(s);
  for (int i = 0; i < horizon; ++i) {
    const int a = rng.categorical(pi.row(s).vec());
    s = rng.categorical(mdp.transition[s][a]);
    states.push_back(s);
  }
  return states;
}

Trajectory rollout_with_actions(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                                int horizon, Rng& rng) {
  Trajectory out;
  out.states.reserve(horizon + 1);
  out.actions.reserve(horizon);
  int s = rng.categorical(mdp.mu0);
  out.states.push_back(s);
  for (int i = 0; i < horizon; ++i) {
    const int a = rng.categorical(pi.row(s).vec());
    out.actions.push_back(a);
    s = rng.categorical(mdp.transition[s][a]);
    out.states.push_back(s);
  }
  return out;
}

Eigen::VectorXd empirical_visitation(const TabularMdpSpec& mdp, const TabularPolicy& pi,
                                     double gamma, long steps, Rng& rng) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(mdp.num_states);
  int s = rng.categorical(mdp.mu0);
  for (long i = 0; i < steps; ++i) {
    counts(s) += 1.0;
    if (rng.uniform() < 1.0 - gamma) {
      s = rng.categorical(mdp.mu0);  // geometric restart
    } else {
      const int a = rng.categorical(pi.row(s).vec());
      s = rng.categorical(mdp.transition[s][a]);
    }
  }
  return counts / static_cast<double>(steps);
}

}  // namespace mdirl
