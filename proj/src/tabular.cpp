#include "mdirl/tabular.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdirl {

TabularPolicy::TabularPolicy(std::vector<ProbVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("TabularPolicy: no states");
  for (const auto& r : rows_) {
    if (r.size() != rows_[0].size())
      throw std::invalid_argument("TabularPolicy: ragged action dimension");
  }
}

TabularPolicy TabularPolicy::uniform(int num_states, int num_actions) {
  std::vector<ProbVector> rows;
  rows.reserve(num_states);
  for (int s = 0; s < num_states; ++s) rows.push_back(ProbVector::uniform(num_actions));
  return TabularPolicy(std::move(rows));
}

void TabularPolicy::set_row(int s, ProbVector p) {
  if (p.size() != num_actions())
    throw std::invalid_argument("TabularPolicy: row size mismatch");
  rows_[static_cast<size_t>(s)] = std::move(p);
}

namespace {

void check_same_shape(const TabularPolicy& a, const TabularPolicy& b, const char* what) {
  if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) {
    std::ostringstream os;
    os << what << ": policy shapes differ";
    throw std::invalid_argument(os.str());
  }
}

// Largest deviation from the mean: the component of r outside the constant
// direction, which is the only part visible to simplex inner products.
double tangent_residual(const Eigen::VectorXd& r) {
  const double m = r.mean();
  return (r.array() - m).abs().maxCoeff();
}

}  // namespace

MdStepResult md_step_tabular(const TabularPolicy& pi_t, const TabularPolicy& pi_bar,
                             double eta, const Regularizer& reg, double eps) {
  check_same_shape(pi_t, pi_bar, "md_step_tabular");
  if (eta < 0.0) throw std::invalid_argument("md_step_tabular: eta must be >= 0");

  std::vector<ProbVector> rows;
  rows.reserve(pi_t.num_states());
  bool clamped = false;
  double max_residual = 0.0;
  for (int s = 0; s < pi_t.num_states(); ++s) {
    const DualVector g_cur = grad_omega(pi_t.row(s), reg);
    const DualVector g_bar = grad_omega(pi_bar.row(s), reg);
    const DualVector y = eta * g_bar + (1.0 - eta) * g_cur;
    DualSolveDiag diag;
    ProbVector next = grad_omega_star(y, reg, eps, &diag);
    if (diag.clamped()) {
      clamped = true;
    } else {
      const DualVector lhs = eta * (g_cur - g_bar);
      const DualVector rhs = g_cur - grad_omega(next, reg);
      max_residual = std::max(max_residual, tangent_residual(lhs - rhs));
    }
    rows.push_back(std::move(next));
  }
  return {TabularPolicy(std::move(rows)), clamped, max_residual};
}

double temporal_cost(const TabularPolicy& pi, const TabularPolicy& pi_bar,
                     const std::vector<int>& trajectory, double gamma,
                     const Regularizer& reg) {
  check_same_shape(pi, pi_bar, "temporal_cost");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("temporal_cost: gamma must be in [0, 1)");
  double cost = 0.0, w = 1.0;
  for (const int s : trajectory) {
    if (s < 0 || s >= pi.num_states())
      throw std::invalid_argument("temporal_cost: state index out of range");
    cost += w * bregman_div(pi.row(s), pi_bar.row(s), reg);
    w *= gamma;
    if (w == 0.0) break;
  }
  return cost;
}

int discounted_horizon(double gamma, double tail_tol) {
  if (gamma <= 0.0) return 1;
  return static_cast<int>(std::ceil(std::log(tail_tol) / std::log(gamma)));
}

TabularPolicy regret_comparator(const std::vector<HistoryEntry>& history,
                                const Regularizer& reg, double eps) {
  if (history.empty()) throw std::invalid_argument("regret_comparator: empty history");
  const int S = history[0].reference.num_states();
  const int A = history[0].reference.num_actions();
  std::vector<ProbVector> rows;
  rows.reserve(S);
  for (int s = 0; s < S; ++s) {
    DualVector avg = DualVector::Zero(A);
    for (const auto& h : history) avg += grad_omega(h.reference.row(s), reg);
    avg /= static_cast<double>(history.size());
    rows.push_back(grad_omega_star(avg, reg, eps));
  }
  return TabularPolicy(std::move(rows));
}

double regret(const std::vector<HistoryEntry>& history, double gamma,
              const Regularizer& reg, const std::optional<TabularPolicy>& comparator,
              double eps) {
  if (history.empty()) throw std::invalid_argument("regret: empty history");
  const TabularPolicy star =
      comparator ? *comparator : regret_comparator(history, reg, eps);
  double realized = 0.0, best = 0.0;
  for (const auto& h : history) {
    realized += temporal_cost(h.policy, h.reference, h.trajectory, gamma, reg);
    best += temporal_cost(star, h.reference, h.trajectory, gamma, reg);
  }
  const double t = static_cast<double>(history.size());
  return realized / t - best / t;
}

std::vector<DualVector> psi_lambda_reward(const std::vector<DualVector>& psi,
                                          const Eigen::VectorXd& rho_e,
                                          const Eigen::VectorXd& rho_theta,
                                          double lambda) {
  const int S = static_cast<int>(psi.size());
  if (rho_e.size() != S || rho_theta.size() != S)
    throw std::invalid_argument("psi_lambda_reward: density length mismatch");
  std::vector<DualVector> out;
  out.reserve(S);
  for (int s = 0; s < S; ++s) {
    const double ratio = std::log(std::max(rho_e(s), 1e-12) /
                                  std::max(rho_theta(s), 1e-12));
    out.push_back((lambda * psi[s]).array() + ratio);
  }
  return out;
}

RewardNormalizer::RewardNormalizer(double momentum) : momentum_(momentum) {
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw std::invalid_argument("RewardNormalizer: momentum must be in [0, 1)");
}

double RewardNormalizer::process(double reward) {
  if (!initialized_) {
    mean_ = reward;
    initialized_ = true;
  } else {
    mean_ = momentum_ * mean_ + (1.0 - momentum_) * reward;
  }
  return reward - mean_;
}

TabularPolicy exact_regularized_rl(const std::vector<DualVector>& psi,
                                   const Regularizer& reg, double eps) {
  if (psi.empty()) throw std::invalid_argument("exact_regularized_rl: empty table");
  std::vector<ProbVector> rows;
  rows.reserve(psi.size());
  for (const auto& y : psi) rows.push_back(grad_omega_star(y, reg, eps));
  return TabularPolicy(std::move(rows));
}

double mdairl_loss(const TabularPolicy& pi_phi, const TabularPolicy& pi_nu,
                   const TabularPolicy& pi_theta, double eta,
                   const Eigen::VectorXd& state_weights, const Regularizer& reg) {
  check_same_shape(pi_phi, pi_nu, "mdairl_loss");
  check_same_shape(pi_phi, pi_theta, "mdairl_loss");
  if (state_weights.size() != pi_phi.num_states())
    throw std::invalid_argument("mdairl_loss: weight length mismatch");
  double loss = 0.0;
  for (int s = 0; s < pi_phi.num_states(); ++s) {
    if (state_weights(s) < 0.0)
      throw std::invalid_argument("mdairl_loss: negative state weight");
    if (state_weights(s) == 0.0) continue;
    loss += state_weights(s) *
            (eta * bregman_div(pi_phi.row(s), pi_nu.row(s), reg) +
             (1.0 - eta) * bregman_div(pi_phi.row(s), pi_theta.row(s), reg));
  }
  return loss;
}

namespace {

// Euclidean projection onto the clamped simplex: shift-and-clamp with a
// bisection on the shift.
Eigen::VectorXd euclid_project(const Eigen::VectorXd& x, double eps) {
  const int n = static_cast<int>(x.size());
  const double lo = eps, hi = simplex_upper(n, eps);
  double tlo = x.minCoeff() - hi, thi = x.maxCoeff() - lo;
  for (int i = 0; i < 100; ++i) {
    const double t = 0.5 * (tlo + thi);
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
      sum += std::min(std::max(x(j) - t, lo), hi);
    (sum > 1.0 ? tlo : thi) = t;
  }
  const double t = 0.5 * (tlo + thi);
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) out(j) = std::min(std::max(x(j) - t, lo), hi);
  return out;
}

// Minimizes eta D(p||nu) + (1-eta) D(p||theta) for one state by projected
// gradient descent in the primal coordinates.
ProbVector prox_minimize_state(const ProbVector& nu, const ProbVector& theta,
                               double eta, const Regularizer& reg, double eps) {
  const int n = nu.size();
  const DualVector g_nu = grad_omega(nu, reg);
  const DualVector g_th = grad_omega(theta, reg);
  const DualVector pull = eta * g_nu + (1.0 - eta) * g_th;

  const auto loss = [&](const Eigen::VectorXd& p) {
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      v += reg.f(p(i)) - pull(i) * p(i);
    return v;
  };

  const double lo = eps, hi = simplex_upper(n, eps);
  Eigen::VectorXd p = 0.5 * (nu.vec() + theta.vec());
  double val = loss(p);
  for (int it = 0; it < 50000; ++it) {
    Eigen::VectorXd grad(n);
    double curv = 0.0;
    for (int i = 0; i < n; ++i) {
      grad(i) = reg.df(p(i)) - pull(i);
      curv = std::max(curv, reg.d2f(p(i)));
    }
    // KKT residual: multiplier estimated from the free coordinates, clamped
    // coordinates only count when their gradient points into the interior
    double mu = 0.0;
    int free_count = 0;
    for (int i = 0; i < n; ++i) {
      if (p(i) > lo && p(i) < hi) {
        mu += grad(i);
        ++free_count;
      }
    }
    mu = free_count > 0 ? mu / free_count : grad.mean();
    double kkt = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = grad(i) - mu;
      if (p(i) <= lo)
        kkt = std::max(kkt, std::max(0.0, -r));
      else if (p(i) >= hi)
        kkt = std::max(kkt, std::max(0.0, r));
      else
        kkt = std::max(kkt, std::abs(r));
    }
    if (kkt < 5e-11) break;

    double step = curv > 0.0 ? 1.0 / curv : 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd cand = euclid_project(p - step * grad, eps);
      const double cval = loss(cand);
      if (cval < val) {
        p = cand;
        val = cval;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // loss differences at the float floor; polish below
  }
  // Fixed-step contraction polish: near the optimum the projected-gradient
  // map keeps contracting even when loss comparisons are no longer reliable.
  for (int it = 0; it < 400; ++it) {
    Eigen::VectorXd grad(n);
    double curv = 0.0;
    for (int i = 0; i < n; ++i) {
      grad(i) = reg.df(p(i)) - pull(i);
      curv = std::max(curv, reg.d2f(p(i)));
    }
    const Eigen::VectorXd next =
        euclid_project(p - (curv > 0.0 ? 1.0 / curv : 1.0) * grad, eps);
    if ((next - p).cwiseAbs().maxCoeff() < 1e-15) {
      p = next;
      break;
    }
    p = next;
  }
  return ProbVector::unchecked(clamp_to_simplex(p, eps));
}

}  // namespace

TabularPolicy mdairl_minimizer(const TabularPolicy& pi_nu, const TabularPolicy& pi_theta,
                               double eta, const Regularizer& reg, double eps) {
  check_same_shape(pi_nu, pi_theta, "mdairl_minimizer");
  std::vector<ProbVector> rows;
  rows.reserve(pi_nu.num_states());
  for (int s = 0; s < pi_nu.num_states(); ++s)
    rows.push_back(prox_minimize_state(pi_nu.row(s), pi_theta.row(s), eta, reg, eps));
  return TabularPolicy(std::move(rows));
}

}  // namespace mdirl
