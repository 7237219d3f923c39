#pragma once

#include <Eigen/Core>

namespace mdirl {

// Standard-deviation clipping bounds for Gaussian policies.
inline constexpr double kSigmaMin = 0.01;
inline constexpr double kSigmaMax = 2.0;

// Full covariance parameterized as Sigma = L diag(sigma^2) L^T with L a unit
// lower-triangular matrix stored by its strict lower entries (row major) and
// sigma stored on the log scale, clipped to [kSigmaMin, kSigmaMax].
class LdlCovariance {
 public:
  // Clips log_sigma into [ln kSigmaMin, ln kSigmaMax].
  static LdlCovariance make(Eigen::VectorXd lower, Eigen::VectorXd log_sigma);
  static LdlCovariance identity(int dim);

  // Factors a dense symmetric positive (semi)definite matrix; nonpositive
  // pivots fall back to kSigmaMin^2.
  static LdlCovariance decompose(const Eigen::MatrixXd& sigma);

  int dim() const { return dim_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& log_sigma() const { return log_sigma_; }
  Eigen::VectorXd sigma() const { return log_sigma_.array().exp(); }

  Eigen::MatrixXd unit_lower() const;     // L
  Eigen::MatrixXd unit_lower_inv() const; // L^{-1}, forward substitution

  Eigen::MatrixXd compose() const;  // Sigma
  Eigen::MatrixXd invert() const;   // Sigma^{-1} = L^{-T} diag(1/sigma^2) L^{-1}
  double logdet() const;            // ln|Sigma| = 2 sum ln sigma_i

 private:
  LdlCovariance(int dim, Eigen::VectorXd lower, Eigen::VectorXd log_sigma)
      : dim_(dim), lower_(std::move(lower)), log_sigma_(std::move(log_sigma)) {}
  int dim_;
  Eigen::VectorXd lower_;      // d(d-1)/2 strict lower entries of L
  Eigen::VectorXd log_sigma_;  // d log standard deviations
};

}  // namespace mdirl
