#include "mdirl/ldl.hpp"

#include <cmath>
#include <stdexcept>

namespace mdirl {

namespace {

int lower_count(int dim) { return dim * (dim - 1) / 2; }

}  // namespace

LdlCovariance LdlCovariance::make(Eigen::VectorXd lower, Eigen::VectorXd log_sigma) {
  const int d = static_cast<int>(log_sigma.size());
  if (d < 1) throw std::invalid_argument("LdlCovariance: empty log_sigma");
  if (lower.size() != lower_count(d))
    throw std::invalid_argument("LdlCovariance: lower entry count mismatch");
  for (int i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower(i)))
      throw std::invalid_argument("LdlCovariance: non-finite lower entry");
  }
  const double lo = std::log(kSigmaMin), hi = std::log(kSigmaMax);
  for (int i = 0; i < d; ++i) {
    if (!std::isfinite(log_sigma(i)))
      throw std::invalid_argument("LdlCovariance: non-finite log_sigma entry");
    log_sigma(i) = std::min(std::max(log_sigma(i), lo), hi);
  }
  return LdlCovariance(d, std::move(lower), std::move(log_sigma));
}

LdlCovariance LdlCovariance::identity(int dim) {
  return make(Eigen::VectorXd::Zero(lower_count(dim)), Eigen::VectorXd::Zero(dim));
}

Eigen::MatrixXd LdlCovariance::unit_lower() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(dim_, dim_);
  int k = 0;
  for (int i = 1; i < dim_; ++i)
    for (int j = 0; j < i; ++j) L(i, j) = lower_(k++);
  return L;
}

Eigen::MatrixXd LdlCovariance::unit_lower_inv() const {
  // Column-wise forward substitution; the inverse is unit lower-triangular.
  const Eigen::MatrixXd L = unit_lower();
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    for (int i = j + 1; i < dim_; ++i) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s += L(i, k) * M(k, j);
      M(i, j) = -s;
    }
  }
  return M;
}

Eigen::MatrixXd LdlCovariance::compose() const {
  const Eigen::MatrixXd L = unit_lower();
  const Eigen::VectorXd var = sigma().array().square();
  return L * var.asDiagonal() * L.transpose();
}

Eigen::MatrixXd LdlCovariance::invert() const {
  const Eigen::MatrixXd Linv = unit_lower_inv();
  const Eigen::VectorXd inv_var = sigma().array().square().inverse();
  return Linv.transpose() * inv_var.asDiagonal() * Linv;
}

double LdlCovariance::logdet() const { return 2.0 * log_sigma_.sum(); }

LdlCovariance LdlCovariance::decompose(const Eigen::MatrixXd& sigma) {
  const int d = static_cast<int>(sigma.rows());
  if (sigma.cols() != d || d < 1)
    throw std::invalid_argument("LdlCovariance::decompose: matrix must be square");
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd diag(d);
  for (int j = 0; j < d; ++j) {
    double dj = sigma(j, j);
    for (int k = 0; k < j; ++k) dj -= L(j, k) * L(j, k) * diag(k);
    if (!(dj > 1e-10)) {
      // degenerate pivot: pin the scale and drop the coupling
      diag(j) = kSigmaMin * kSigmaMin;
      for (int i = j + 1; i < d; ++i) L(i, j) = 0.0;
      continue;
    }
    diag(j) = dj;
    for (int i = j + 1; i < d; ++i) {
      double s = sigma(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k) * diag(k);
      L(i, j) = s / dj;
    }
  }
  Eigen::VectorXd lower(lower_count(d));
  int k = 0;
  for (int i = 1; i < d; ++i)
    for (int j = 0; j < i; ++j) lower(k++) = L(i, j);
  return make(std::move(lower), diag.array().sqrt().log());
}

}  // namespace mdirl
