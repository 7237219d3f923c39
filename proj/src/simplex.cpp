#include "mdirl/simplex.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdirl {

ProbVector ProbVector::validated(Eigen::VectorXd v, double eps) {
  const int n = static_cast<int>(v.size());
  if (n < 1) throw std::invalid_argument("ProbVector: empty vector");
  const double hi = simplex_upper(n, eps);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = v(i);
    if (!std::isfinite(x)) throw std::invalid_argument("ProbVector: non-finite entry");
    // small slack for values produced by iterative solvers
    if (x < eps - 1e-12 || x > hi + 1e-12) {
      std::ostringstream os;
      os << "ProbVector: entry " << i << " = " << x << " outside clamp ["
         << eps << ", " << hi << "]";
      throw std::invalid_argument(os.str());
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    std::ostringstream os;
    os << "ProbVector: sum deviates from 1 by " << (sum - 1.0);
    throw std::invalid_argument(os.str());
  }
  return ProbVector(std::move(v));
}

ProbVector ProbVector::from_weights(const Eigen::VectorXd& w, double eps) {
  const int n = static_cast<int>(w.size());
  if (n < 1) throw std::invalid_argument("ProbVector: empty weight vector");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(w(i)) || w(i) < 0.0)
      throw std::invalid_argument("ProbVector: weights must be finite and nonnegative");
    sum += w(i);
  }
  Eigen::VectorXd v;
  if (sum <= 0.0) {
    v = Eigen::VectorXd::Constant(n, 1.0 / n);
  } else {
    v = w / sum;
  }
  return ProbVector(clamp_to_simplex(std::move(v), eps));
}

ProbVector ProbVector::uniform(int n) {
  return ProbVector(Eigen::VectorXd::Constant(n, 1.0 / n));
}

ProbVector ProbVector::unchecked(Eigen::VectorXd v) {
  return ProbVector(std::move(v));
}

Eigen::VectorXd clamp_to_simplex(Eigen::VectorXd x, double eps) {
  const int n = static_cast<int>(x.size());
  if (n == 1) {
    x(0) = 1.0;
    return x;
  }
  const double lo = eps;
  const double hi = simplex_upper(n, eps);
  for (int pass = 0; pass < n + 1; ++pass) {
    double fixed = 0.0, free_sum = 0.0;
    int free_count = 0;
    for (int i = 0; i < n; ++i) {
      if (x(i) <= lo) {
        x(i) = lo;
        fixed += lo;
      } else if (x(i) >= hi) {
        x(i) = hi;
        fixed += hi;
      } else {
        free_sum += x(i);
        ++free_count;
      }
    }
    const double target = 1.0 - fixed;
    if (free_count == 0 || free_sum <= 0.0) break;
    const double scale = target / free_sum;
    if (std::abs(scale - 1.0) < 1e-15) break;
    bool reclamped = false;
    for (int i = 0; i < n; ++i) {
      if (x(i) > lo && x(i) < hi) {
        x(i) *= scale;
        if (x(i) <= lo || x(i) >= hi) reclamped = true;
      }
    }
    if (!reclamped) break;
  }
  // absorb residual rounding into the largest free coordinate
  double sum = x.sum();
  int imax = 0;
  x.maxCoeff(&imax);
  x(imax) += 1.0 - sum;
  return x;
}

}  // namespace mdirl
