#pragma once

#include "mdirl/regularizer.hpp"
#include "mdirl/simplex.hpp"

namespace mdirl {

// Details of a constrained dual-to-primal solve.
struct DualSolveDiag {
  int iterations = 0;
  double sum_residual = 0.0;
  int clamped_low = 0;   // entries pinned at eps
  int clamped_high = 0;  // entries pinned at the upper clamp
  bool nonconvex_saturated = false;  // sin kernel hit its convexity limit
  bool clamped() const { return clamped_low + clamped_high > 0 || nonconvex_saturated; }
};

// Omega(p) = sum_a f(p_a). Throws on a non-finite kernel evaluation.
double omega(const ProbVector& p, const Regularizer& reg);

// Componentwise derivative of the separable Omega.
DualVector grad_omega(const ProbVector& p, const Regularizer& reg);

// D(p || phat) = Omega(p) - Omega(phat) - <grad Omega(phat), p - phat>.
double bregman_div(const ProbVector& p, const ProbVector& phat, const Regularizer& reg);

// argmax over the clamped simplex of <pi, y> - Omega(pi), solved by a
// safeguarded Newton/bisection search on the Lagrange multiplier of the
// sum constraint, using the monotone componentwise inverse of grad Omega.
ProbVector grad_omega_star(const DualVector& y, const Regularizer& reg,
                           double eps = kEpsMin, DualSolveDiag* diag = nullptr);

// psi_p = grad Omega(p) + c*1 with c = Omega(p) - <p, grad Omega(p)>; the
// unique reward whose regularized optimum is p (grad_omega_star inverts it).
DualVector reward_operator_psi(const ProbVector& p, const Regularizer& reg);

// Feasible minimizer of D(. || x) over the clamped simplex for an x that
// sums to 1 but may violate the clamp. Equals grad_omega_star(grad Omega(x)).
ProbVector bregman_project(const Eigen::VectorXd& x, const Regularizer& reg,
                           double eps = kEpsMin, DualSolveDiag* diag = nullptr);

}  // namespace mdirl
