#include "mdirl/bregman.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdirl {

namespace {

constexpr int kMaxMultiplierIters = 200;
constexpr double kSumResidualTol = 1e-12;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << ": non-finite kernel evaluation (domain violation)";
    throw std::domain_error(os.str());
  }
}

}  // namespace

double omega(const ProbVector& p, const Regularizer& reg) {
  double sum = reg.offset();
  for (int i = 0; i < p.size(); ++i) sum += reg.f(p[i]);
  check_finite(sum, "omega");
  return sum;
}

DualVector grad_omega(const ProbVector& p, const Regularizer& reg) {
  DualVector g(p.size());
  for (int i = 0; i < p.size(); ++i) {
    g(i) = reg.df(p[i]);
    check_finite(g(i), "grad_omega");
  }
  return g;
}

double bregman_div(const ProbVector& p, const ProbVector& phat, const Regularizer& reg) {
  if (p.size() != phat.size())
    throw std::invalid_argument("bregman_div: length mismatch");
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    d += reg.f(p[i]) - reg.f(phat[i]) - reg.df(phat[i]) * (p[i] - phat[i]);
  }
  check_finite(d, "bregman_div");
  return d;
}

ProbVector grad_omega_star(const DualVector& y, const Regularizer& reg,
                           double eps, DualSolveDiag* diag) {
  const int n = static_cast<int>(y.size());
  if (n < 1) throw std::invalid_argument("grad_omega_star: empty dual vector");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(y(i)))
      throw std::invalid_argument("grad_omega_star: non-finite dual entry");
  }
  if (n == 1) {
    if (diag) *diag = {};
    return ProbVector::unchecked(Eigen::VectorXd::Constant(1, 1.0));
  }

  const double lo = eps;
  const double box_hi = simplex_upper(n, eps);
  const double convex_hi = reg.convex_upper_limit();
  const double hi = std::min(box_hi, convex_hi);
  if (n * hi < 1.0)
    throw std::invalid_argument("grad_omega_star: clamp leaves no feasible point");

  // Stationarity: df(x_i) = y_i - nu, x_i boxed to [lo, hi]. The entry sum
  // is continuous and nonincreasing in nu, so solve sum(nu) = 1 by Newton
  // with a bisection safeguard.
  double nu_lo = y.minCoeff() - reg.df(hi);  // all entries at hi -> sum >= 1
  double nu_hi = y.maxCoeff() - reg.df(lo);  // all entries at lo -> sum < 1

  Eigen::VectorXd x(n);
  const auto eval = [&](double nu) {
    double sum = 0.0, slope = 0.0;
    for (int i = 0; i < n; ++i) {
      x(i) = reg.df_inverse(y(i) - nu, lo, hi);
      sum += x(i);
      if (x(i) > lo && x(i) < hi) {
        const double d2 = reg.d2f(x(i));
        if (d2 > 0.0) slope -= 1.0 / d2;
      }
    }
    return std::pair<double, double>(sum - 1.0, slope);
  };

  double nu = 0.5 * (nu_lo + nu_hi);
  double residual = 0.0;
  int used = 0;
  bool converged = false;
  for (int it = 0; it < kMaxMultiplierIters; ++it) {
    used = it + 1;
    const auto [h, slope] = eval(nu);
    residual = h;
    if (std::abs(h) <= kSumResidualTol) {
      converged = true;
      break;
    }
    (h > 0.0 ? nu_lo : nu_hi) = nu;
    double next = slope < 0.0 ? nu - h / slope : nu;
    if (!(next > nu_lo && next < nu_hi)) next = 0.5 * (nu_lo + nu_hi);
    if (std::abs(next - nu) < 1e-17 * std::max(1.0, std::abs(nu))) {
      nu = next;
      const auto [h2, s2] = eval(nu);
      (void)s2;
      residual = h2;
      converged = std::abs(h2) <= kSumResidualTol;
      break;
    }
    nu = next;
  }
  if (!converged && std::abs(residual) > kSumResidualTol) {
    // One last evaluation at the bracket midpoint before giving up.
    nu = 0.5 * (nu_lo + nu_hi);
    const auto [h, s] = eval(nu);
    (void)s;
    residual = h;
    if (std::abs(residual) > kSumResidualTol) {
      std::ostringstream os;
      os << "grad_omega_star: multiplier search did not converge; sum residual = "
         << residual;
      throw std::runtime_error(os.str());
    }
  }

  if (diag) {
    DualSolveDiag d;
    d.iterations = used;
    d.sum_residual = residual;
    for (int i = 0; i < n; ++i) {
      if (x(i) <= lo) ++d.clamped_low;
      if (x(i) >= hi) {
        if (hi < box_hi)
          d.nonconvex_saturated = true;
        else
          ++d.clamped_high;
      }
    }
    *diag = d;
  }
  return ProbVector::unchecked(std::move(x));
}

DualVector reward_operator_psi(const ProbVector& p, const Regularizer& reg) {
  DualVector g = grad_omega(p, reg);
  const double c = omega(p, reg) - p.vec().dot(g);
  return g.array() + c;
}

ProbVector bregman_project(const Eigen::VectorXd& x, const Regularizer& reg,
                           double eps, DualSolveDiag* diag) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw std::invalid_argument("bregman_project: empty input");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(x(i)))
      throw std::invalid_argument("bregman_project: non-finite entry");
    sum += x(i);
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("bregman_project: input does not sum to 1");

  const double hi = simplex_upper(n, eps);
  bool feasible = true;
  for (int i = 0; i < n; ++i) {
    if (x(i) < eps || x(i) > hi) {
      feasible = false;
      break;
    }
  }
  if (feasible) {
    if (diag) *diag = {};
    return ProbVector::unchecked(x);
  }

  // argmin_p D(p || x) = argmax_p <p, grad Omega(x)> - Omega(p), so reuse
  // the constrained dual solver at the raw kernel gradient of x.
  DualVector g(n);
  for (int i = 0; i < n; ++i) {
    g(i) = reg.df(x(i));
    check_finite(g(i), "bregman_project");
  }
  return grad_omega_star(g, reg, eps, diag);
}

}  // namespace mdirl
