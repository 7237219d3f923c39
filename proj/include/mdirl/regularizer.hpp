#pragma once

#include <string>

namespace mdirl {

enum class RegKind { shannon, tsallis, exp_kernel, cos_kernel, sin_kernel };

// Entropic regularizer over the simplex, Omega(p) = sum_a f(p_a), where f is
// the kernel summand x*phi(x) signed so that f is convex on the operating
// region:
//   shannon     f(x) = x ln x
//   tsallis     f(x) = k x^q / (q - 1) with offset -k/(q-1), so that
//               Omega(p) = k (sum p^q - 1)/(q - 1),  q > 1, k > 0
//   exp         f(x) = x e^x - e x
//   cos         f(x) = -x cos(pi x / 2)
//   sin         f(x) = x sin(pi x / 2) - x     (convex only below ~0.686;
//                                               see convex_upper_limit)
// Omega(p) = offset + sum_a f(p_a).
class Regularizer {
 public:
  static Regularizer shannon();
  static Regularizer tsallis(double q, double k = 1.0);
  static Regularizer exp();
  static Regularizer cos();
  static Regularizer sin();

  // Parses "shannon", "tsallis:q=<f>,k=<f>", "exp", "cos", "sin".
  static Regularizer parse(const std::string& spec);
  std::string to_string() const;

  RegKind kind() const { return kind_; }
  double q() const { return q_; }
  double k() const { return k_; }
  const char* name() const;

  double f(double x) const;
  double df(double x) const;
  double d2f(double x) const;
  // Constant term of Omega (nonzero only for tsallis).
  double offset() const;

  // Inverse of df restricted to [lo, hi]; df is strictly increasing there.
  // Values of y outside df([lo, hi]) saturate at the interval ends.
  double df_inverse(double y, double lo, double hi) const;

  // Largest x in (0, 1] with f'' > 0 on (0, x). 1 for every kernel except
  // sin, whose summand loses convexity around x = 0.6857.
  double convex_upper_limit() const;
  bool convex_at(double x) const { return d2f(x) > 0.0; }

  bool operator==(const Regularizer& o) const {
    return kind_ == o.kind_ && q_ == o.q_ && k_ == o.k_;
  }

 private:
  Regularizer(RegKind kind, double q, double k) : kind_(kind), q_(q), k_(k) {}
  RegKind kind_;
  double q_ = 0.0;
  double k_ = 0.0;
};

}  // namespace mdirl
