#pragma once

#include <vector>

#include "mdirl/gaussian.hpp"
#include "mdirl/simplex.hpp"

namespace mdirl {

// Stateless bandit with a softmax expert over randomly initialized logits.
struct BanditSpec {
  int num_actions = 100;
  Eigen::VectorXd expert_logits;
  int samples_per_round = 16;
  double smoothing = 0.1;  // Dirichlet pseudo-count for reference fitting

  static BanditSpec make(int num_actions, Rng& rng, int samples_per_round = 16,
                         double smoothing = 0.1, double logit_scale = 1.0);
  ProbVector expert_policy(double eps = kEpsMin) const;
};

// 2D Gaussian toy: expert at [5, 3] with |Sigma_E| < 1, agent starts at N(0, I),
// reference fitted by MLE blending at reference_lr.
struct GaussianToySpec {
  int dim = 2;
  GaussianPolicyParams expert{Eigen::VectorXd::Zero(2), LdlCovariance::identity(2)};
  double reference_lr = 0.5;
  int samples_per_round = 16;

  static GaussianToySpec make(double reference_lr = 0.5, int samples_per_round = 16);
};

// Additive Gaussian action noise of scale epsilon.
struct NoiseSpec {
  double epsilon = 0.0;
};

// samples_per_round i.i.d. draws from softmax(expert_logits).
std::vector<int> sample_expert_bandit(const BanditSpec& spec, Rng& rng);

// Dirichlet-smoothed empirical distribution of the batch, blended into prev
// by an exponential moving average with rate lr.
ProbVector fit_reference_discrete(const ProbVector& prev, const std::vector<int>& batch,
                                  int num_actions, double smoothing, double lr,
                                  double eps = kEpsMin);

// Moves (mean, covariance) toward the batch MLE by step lr; the result is
// refactored into a clipped LdlCovariance. Batches with degenerate
// covariance fall back to the sigma floor.
GaussianPolicyParams fit_reference_gaussian(const GaussianPolicyParams& prev,
                                            const std::vector<Eigen::VectorXd>& batch,
                                            double lr);

// Adds N(0, epsilon^2 I) to every action.
std::vector<Eigen::VectorXd> corrupt_demos(std::vector<Eigen::VectorXd> actions,
                                           const NoiseSpec& noise, Rng& rng);

}  // namespace mdirl
