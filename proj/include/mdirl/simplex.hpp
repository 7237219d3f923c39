#pragma once

#include <Eigen/Core>

namespace mdirl {

// Lower clamp for simplex entries; upper clamp is 1 - (n-1)*eps.
inline constexpr double kEpsMin = 1e-6;
// Allowed deviation of entry sums from 1.
inline constexpr double kSumTol = 1e-12;

// Reward-space / dual-coordinate vector over the action set.
using DualVector = Eigen::VectorXd;

inline double simplex_upper(int n, double eps) {
  return 1.0 - (n - 1) * eps;
}

// A point on the clamped probability simplex: entries sum to 1 within
// kSumTol and lie in [eps, 1 - (n-1)*eps].
class ProbVector {
 public:
  // Checks the invariants and throws std::invalid_argument on violation.
  static ProbVector validated(Eigen::VectorXd v, double eps = kEpsMin);

  // Normalizes nonnegative weights and redistributes mass so every entry
  // respects the clamp. Intended for constructing policies from counts,
  // logits, or fitted parameters.
  static ProbVector from_weights(const Eigen::VectorXd& w, double eps = kEpsMin);

  static ProbVector uniform(int n);

  // Trusted constructor for values produced by the constrained dual solver.
  static ProbVector unchecked(Eigen::VectorXd v);

  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_(i); }
  const Eigen::VectorXd& vec() const { return v_; }

  bool operator==(const ProbVector& o) const { return v_ == o.v_; }

 private:
  explicit ProbVector(Eigen::VectorXd v) : v_(std::move(v)) {}
  Eigen::VectorXd v_;
};

// Clamp a normalized vector into [eps, 1-(n-1)eps] while keeping the sum at 1,
// rescaling the unclamped coordinates proportionally.
Eigen::VectorXd clamp_to_simplex(Eigen::VectorXd x, double eps = kEpsMin);

}  // namespace mdirl
