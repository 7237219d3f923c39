#pragma once

#include "mdirl/ldl.hpp"
#include "mdirl/regularizer.hpp"
#include "mdirl/rng.hpp"

namespace mdirl {

struct GaussianPolicyParams {
  Eigen::VectorXd mean;
  LdlCovariance cov;

  int dim() const { return static_cast<int>(mean.size()); }

  static GaussianPolicyParams standard(int dim) {
    return {Eigen::VectorXd::Zero(dim), LdlCovariance::identity(dim)};
  }

  // Flat serialization [mu; log_sigma; lower] for config and CSV round trips.
  Eigen::VectorXd flatten() const;
  static GaussianPolicyParams unflatten(const Eigen::VectorXd& flat, int dim);
};

// Exponential-family coordinates: theta1 = Sigma^{-1} mu, theta2 = -1/2 Sigma^{-1}.
struct NaturalParams {
  Eigen::VectorXd theta1;
  Eigen::MatrixXd theta2;
};

NaturalParams natural_params(const GaussianPolicyParams& g);

// From natural coordinates back to (mean, LDL covariance); throws if theta2
// is not negative definite.
GaussianPolicyParams from_natural(const NaturalParams& theta);

// F(theta) = 1/2 mu^T Sigma^{-1} mu + 1/2 ln (2 pi)^d |Sigma|.
double log_partition(const NaturalParams& theta);
double log_partition(const GaussianPolicyParams& g);

double log_density(const GaussianPolicyParams& g, const Eigen::VectorXd& a);

// I(pi, pihat; alpha, beta) = integral of pi^alpha * pihat^beta
//                           = exp(F(alpha theta + beta thetahat)
//                                 - alpha F(theta) - beta F(thetahat)).
double interaction_integral(const GaussianPolicyParams& g,
                            const GaussianPolicyParams& ghat,
                            double alpha, double beta);

// T^k_q(pi) = k (1 - exp(F(q theta) - q F(theta))) / (q - 1), q > 1.
double tsallis_entropy_gaussian(const GaussianPolicyParams& g, double q, double k = 1.0);

// Bregman divergence between Gaussians for the Shannon regularizer (the
// closed-form Gaussian KL) or the Tsallis regularizer.
double bregman_div_gaussian(const GaussianPolicyParams& g,
                            const GaussianPolicyParams& ghat,
                            const Regularizer& reg);

// Regularized reward at action a; for q = 1, k = 1 this is log pi(a|s).
double psi_gaussian(const GaussianPolicyParams& g, const Eigen::VectorXd& a,
                    double q, double k = 1.0);

// a = mu + L (sigma .* z), z ~ N(0, I).
Eigen::VectorXd sample_action(const GaussianPolicyParams& g, Rng& rng);

struct GaussianMdInfo {
  int iterations = 0;
  double grad_norm = 0.0;
  double objective = 0.0;
};

// One mirror-descent step toward `target`: exact natural-parameter
// interpolation for Shannon, numerical minimization of
//   G(pi) = eta D(pi || target) + (1 - eta) D(pi || current)
// over (mu, lower, log_sigma) for Tsallis.
GaussianPolicyParams md_update_gaussian(const GaussianPolicyParams& current,
                                        const GaussianPolicyParams& target,
                                        double eta, const Regularizer& reg,
                                        GaussianMdInfo* info = nullptr);

}  // namespace mdirl
