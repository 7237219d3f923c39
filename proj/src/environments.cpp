#include "mdirl/environments.hpp"

#include <cmath>
#include <stdexcept>

namespace mdirl {

BanditSpec BanditSpec::make(int num_actions, Rng& rng, int samples_per_round,
                            double smoothing, double logit_scale) {
  if (num_actions < 2) throw std::invalid_argument("BanditSpec: need >= 2 actions");
  if (samples_per_round < 1)
    throw std::invalid_argument("BanditSpec: samples_per_round must be >= 1");
  BanditSpec spec;
  spec.num_actions = num_actions;
  spec.samples_per_round = samples_per_round;
  spec.smoothing = smoothing;
  spec.expert_logits = logit_scale * rng.normal_vec(num_actions);
  return spec;
}

ProbVector BanditSpec::expert_policy(double eps) const {
  const Eigen::VectorXd shifted =
      (expert_logits.array() - expert_logits.maxCoeff()).exp();
  return ProbVector::from_weights(shifted, eps);
}

GaussianToySpec GaussianToySpec::make(double reference_lr, int samples_per_round) {
  GaussianToySpec spec;
  spec.reference_lr = reference_lr;
  spec.samples_per_round = samples_per_round;
  Eigen::VectorXd mean(2);
  mean << 5.0, 3.0;
  Eigen::VectorXd lower(1);
  lower << 0.3;
  Eigen::VectorXd log_sigma(2);
  log_sigma << std::log(0.8), std::log(0.9);  // |Sigma_E| = 0.5184 < 1
  spec.expert = {mean, LdlCovariance::make(lower, log_sigma)};
  return spec;
}

std::vector<int> sample_expert_bandit(const BanditSpec& spec, Rng& rng) {
  const ProbVector pi = spec.expert_policy();
  const Eigen::VectorXd cdf = cumulative(pi.vec());
  std::vector<int> batch(spec.samples_per_round);
  for (int i = 0; i < spec.samples_per_round; ++i) batch[i] = rng.from_cdf(cdf);
  return batch;
}

ProbVector fit_reference_discrete(const ProbVector& prev, const std::vector<int>& batch,
                                  int num_actions, double smoothing, double lr,
                                  double eps) {
  if (batch.empty()) throw std::invalid_argument("fit_reference_discrete: empty batch");
  if (!(lr >= 0.0 && lr <= 1.0))
    throw std::invalid_argument("fit_reference_discrete: lr must be in [0, 1]");
  Eigen::VectorXd counts = Eigen::VectorXd::Constant(num_actions, smoothing);
  for (const int a : batch) {
    if (a < 0 || a >= num_actions)
      throw std::invalid_argument("fit_reference_discrete: action out of range");
    counts(a) += 1.0;
  }
  const Eigen::VectorXd mle = counts / counts.sum();
  const Eigen::VectorXd blended = (1.0 - lr) * prev.vec() + lr * mle;
  return ProbVector::from_weights(blended, eps);
}

GaussianPolicyParams fit_reference_gaussian(const GaussianPolicyParams& prev,
                                            const std::vector<Eigen::VectorXd>& batch,
                                            double lr) {
  if (batch.size() < 2)
    throw std::invalid_argument("fit_reference_gaussian: need a batch of >= 2");
  if (!(lr >= 0.0 && lr <= 1.0))
    throw std::invalid_argument("fit_reference_gaussian: lr must be in [0, 1]");
  const int d = prev.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& a : batch) {
    if (a.size() != d)
      throw std::invalid_argument("fit_reference_gaussian: action dimension mismatch");
    mean += a;
  }
  mean /= static_cast<double>(batch.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& a : batch) {
    const Eigen::VectorXd diff = a - mean;
    cov += diff * diff.transpose();
  }
  cov /= static_cast<double>(batch.size());  // MLE normalization

  const Eigen::VectorXd new_mean = (1.0 - lr) * prev.mean + lr * mean;
  const Eigen::MatrixXd new_cov = (1.0 - lr) * prev.cov.compose() + lr * cov;
  return {new_mean, LdlCovariance::decompose(new_cov)};
}

std::vector<Eigen::VectorXd> corrupt_demos(std::vector<Eigen::VectorXd> actions,
                                           const NoiseSpec& noise, Rng& rng) {
  if (noise.epsilon < 0.0)
    throw std::invalid_argument("corrupt_demos: epsilon must be >= 0");
  if (noise.epsilon == 0.0) return actions;
  for (auto& a : actions)
    a += noise.epsilon * rng.normal_vec(static_cast<int>(a.size()));
  return actions;
}

}  // namespace mdirl
