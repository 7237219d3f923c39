#include "mdirl/gaussian.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdirl {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)

// Cholesky of -2*theta2; throws if theta2 is not negative definite.
Eigen::LLT<Eigen::MatrixXd> precision_chol(const Eigen::MatrixXd& theta2) {
  Eigen::MatrixXd prec = -2.0 * theta2;
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gaussian: second natural parameter is not negative definite");
  return llt;
}

// Closed-form exponent of integral pi^q = exp(F(q theta) - q F(theta)).
double log_integral_pow_q(const GaussianPolicyParams& g, double q) {
  const int d = g.dim();
  return (1.0 - q) * (0.5 * d * kLog2Pi + g.cov.log_sigma().sum()) -
         0.5 * d * std::log(q);
}

Eigen::VectorXd forward_solve_unit(const Eigen::MatrixXd& L, Eigen::VectorXd b) {
  for (int i = 0; i < b.size(); ++i)
    for (int k = 0; k < i; ++k) b(i) -= L(i, k) * b(k);
  return b;
}

}  // namespace

Eigen::VectorXd GaussianPolicyParams::flatten() const {
  const int d = dim();
  Eigen::VectorXd out(d + d + cov.lower().size());
  out.head(d) = mean;
  out.segment(d, d) = cov.log_sigma();
  out.tail(cov.lower().size()) = cov.lower();
  return out;
}

GaussianPolicyParams GaussianPolicyParams::unflatten(const Eigen::VectorXd& flat, int dim) {
  const int nl = dim * (dim - 1) / 2;
  if (flat.size() != 2 * dim + nl)
    throw std::invalid_argument("GaussianPolicyParams: bad flat vector length");
  return {flat.head(dim),
          LdlCovariance::make(flat.tail(nl), flat.segment(dim, dim))};
}

NaturalParams natural_params(const GaussianPolicyParams& g) {
  const Eigen::MatrixXd prec = g.cov.invert();
  return {prec * g.mean, -0.5 * prec};
}

GaussianPolicyParams from_natural(const NaturalParams& theta) {
  const auto llt = precision_chol(theta.theta2);
  const int d = static_cast<int>(theta.theta1.size());
  const Eigen::MatrixXd sigma =
      llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::VectorXd mu = sigma * theta.theta1;
  return {mu, LdlCovariance::decompose(sigma)};
}

double log_partition(const NaturalParams& theta) {
  const auto llt = precision_chol(theta.theta2);
  const int d = static_cast<int>(theta.theta1.size());
  const Eigen::VectorXd x = llt.solve(theta.theta1);  // Sigma * theta1 = mu
  double logdet_prec = 0.0;                           // ln|-2 theta2| = -ln|Sigma|
  for (int i = 0; i < d; ++i) logdet_prec += 2.0 * std::log(llt.matrixL()(i, i));
  return 0.5 * theta.theta1.dot(x) + 0.5 * (d * kLog2Pi - logdet_prec);
}

double log_partition(const GaussianPolicyParams& g) {
  const Eigen::MatrixXd prec = g.cov.invert();
  return 0.5 * g.mean.dot(prec * g.mean) + 0.5 * (g.dim() * kLog2Pi + g.cov.logdet());
}

double log_density(const GaussianPolicyParams& g, const Eigen::VectorXd& a) {
  if (a.size() != g.mean.size())
    throw std::invalid_argument("log_density: dimension mismatch");
  const Eigen::MatrixXd L = g.cov.unit_lower();
  const Eigen::VectorXd w = forward_solve_unit(L, a - g.mean);
  const Eigen::VectorXd s = g.cov.sigma();
  double quad = 0.0;
  for (int i = 0; i < w.size(); ++i) quad += (w(i) / s(i)) * (w(i) / s(i));
  return -0.5 * (g.dim() * kLog2Pi + g.cov.logdet()) - 0.5 * quad;
}

double interaction_integral(const GaussianPolicyParams& g,
                            const GaussianPolicyParams& ghat,
                            double alpha, double beta) {
  const NaturalParams t = natural_params(g);
  const NaturalParams th = natural_params(ghat);
  NaturalParams combined{alpha * t.theta1 + beta * th.theta1,
                         alpha * t.theta2 + beta * th.theta2};
  double f_comb;
  try {
    f_comb = log_partition(combined);
  } catch (const std::runtime_error&) {
    std::ostringstream os;
    os << "interaction_integral: alpha*theta + beta*thetahat is not a valid "
          "Gaussian (alpha=" << alpha << ", beta=" << beta << ")";
    throw std::invalid_argument(os.str());
  }
  return std::exp(f_comb - alpha * log_partition(t) - beta * log_partition(th));
}

double tsallis_entropy_gaussian(const GaussianPolicyParams& g, double q, double k) {
  if (!(q > 1.0))
    throw std::invalid_argument("tsallis_entropy_gaussian requires q > 1");
  return k * (1.0 - std::exp(log_integral_pow_q(g, q))) / (q - 1.0);
}

double bregman_div_gaussian(const GaussianPolicyParams& g,
                            const GaussianPolicyParams& ghat,
                            const Regularizer& reg) {
  const int d = g.dim();
  if (ghat.dim() != d)
    throw std::invalid_argument("bregman_div_gaussian: dimension mismatch");
  if (reg.kind() == RegKind::shannon) {
    // Gaussian KL(g || ghat)
    const Eigen::MatrixXd prec_hat = ghat.cov.invert();
    const Eigen::MatrixXd sig = g.cov.compose();
    const Eigen::VectorXd dm = ghat.mean - g.mean;
    return 0.5 * ((prec_hat * sig).trace() + dm.dot(prec_hat * dm) - d +
                  ghat.cov.logdet() - g.cov.logdet());
  }
  if (reg.kind() == RegKind::tsallis) {
    const double q = reg.q(), k = reg.k();
    const double cross = interaction_integral(g, ghat, 1.0, q - 1.0);
    const double tq = tsallis_entropy_gaussian(g, q, 1.0);
    const double tq_hat = tsallis_entropy_gaussian(ghat, q, 1.0);
    return k * (q / (q - 1.0) - q / (q - 1.0) * cross - tq - (q - 1.0) * tq_hat);
  }
  throw std::invalid_argument(
      "bregman_div_gaussian: only shannon and tsallis have Gaussian closed forms");
}

double psi_gaussian(const GaussianPolicyParams& g, const Eigen::VectorXd& a,
                    double q, double k) {
  if (q == 1.0) return k * log_density(g, a);
  if (!(q > 1.0)) throw std::invalid_argument("psi_gaussian requires q >= 1");
  const double dens = std::exp(log_density(g, a));
  const double int_pow_q = std::exp(log_integral_pow_q(g, q));
  return k * (q * std::pow(dens, q - 1.0) - 1.0) / (q - 1.0) - k * int_pow_q;
}

Eigen::VectorXd sample_action(const GaussianPolicyParams& g, Rng& rng) {
  const Eigen::VectorXd z = rng.normal_vec(g.dim());
  return g.mean + g.cov.unit_lower() * (g.cov.sigma().cwiseProduct(z));
}

namespace {

GaussianPolicyParams shannon_interp(const GaussianPolicyParams& current,
                                    const GaussianPolicyParams& target,
                                    double eta) {
  const NaturalParams a = natural_params(current);
  const NaturalParams b = natural_params(target);
  NaturalParams mix{(1.0 - eta) * a.theta1 + eta * b.theta1,
                    (1.0 - eta) * a.theta2 + eta * b.theta2};
  try {
    return from_natural(mix);
  } catch (const std::runtime_error&) {
    std::ostringstream os;
    os << "md_update_gaussian: interpolated natural parameter inadmissible "
          "(eta=" << eta << ")";
    throw std::runtime_error(os.str());
  }
}

}  // namespace

GaussianPolicyParams md_update_gaussian(const GaussianPolicyParams& current,
                                        const GaussianPolicyParams& target,
                                        double eta, const Regularizer& reg,
                                        GaussianMdInfo* info) {
  if (eta < 0.0) throw std::invalid_argument("md_update_gaussian: eta must be >= 0");
  if (reg.kind() == RegKind::shannon) {
    GaussianPolicyParams out = shannon_interp(current, target, eta);
    if (info) {
      *info = {};
      info->objective = eta * bregman_div_gaussian(out, target, reg) +
                        (1.0 - eta) * bregman_div_gaussian(out, current, reg);
    }
    return out;
  }
  if (reg.kind() != RegKind::tsallis)
    throw std::invalid_argument("md_update_gaussian: unsupported regularizer");

  const int d = current.dim();
  const int np = 2 * d + d * (d - 1) / 2;
  const double ls_lo = std::log(kSigmaMin), ls_hi = std::log(kSigmaMax);

  const auto project = [&](Eigen::VectorXd x) {
    for (int i = d; i < 2 * d; ++i) x(i) = std::min(std::max(x(i), ls_lo), ls_hi);
    return x;
  };
  const auto objective = [&](const Eigen::VectorXd& x) {
    const GaussianPolicyParams p = GaussianPolicyParams::unflatten(x, d);
    return eta * bregman_div_gaussian(p, target, reg) +
           (1.0 - eta) * bregman_div_gaussian(p, current, reg);
  };

  Eigen::VectorXd x;
  try {
    x = project(shannon_interp(current, target, eta).flatten());
  } catch (const std::runtime_error&) {
    x = project((eta >= 1.0 ? target : current).flatten());
  }

  const auto fd_grad = [&](const Eigen::VectorXd& at) {
    Eigen::VectorXd g(np);
    for (int i = 0; i < np; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(at(i)));
      Eigen::VectorXd xp = at, xm = at;
      xp(i) += h;
      xm(i) -= h;
      g(i) = (objective(project(xp)) - objective(project(xm))) / (2.0 * h);
    }
    // project out components pinned at the sigma box
    for (int i = d; i < 2 * d; ++i) {
      if (at(i) <= ls_lo && g(i) > 0.0) g(i) = 0.0;
      if (at(i) >= ls_hi && g(i) < 0.0) g(i) = 0.0;
    }
    return g;
  };

  // BFGS on the finite-difference gradient; plain gradient descent zig-zags
  // in the narrow valley between the mean and covariance directions.
  double g_val = objective(x);
  Eigen::VectorXd grad = fd_grad(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(np, np);
  double grad_norm = grad.cwiseAbs().maxCoeff();
  int it = 0;
  const int max_iters = 500;
  for (; it < max_iters && grad_norm >= 1e-6; ++it) {
    Eigen::VectorXd dir = -hinv * grad;
    if (dir.dot(grad) >= 0.0) {  // lost descent property, restart
      hinv.setIdentity();
      dir = -grad;
    }
    double step = 1.0;
    const double slope = dir.dot(grad);
    bool moved = false;
    Eigen::VectorXd x_new;
    double val_new = g_val;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = project(x + step * dir);
      val_new = objective(x_new);
      if (val_new <= g_val + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // line search exhausted, gradient check decides below

    const Eigen::VectorXd grad_new = fd_grad(x_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(np, np);
      const Eigen::MatrixXd v = eye - (s * y.transpose()) / sy;
      hinv = v * hinv * v.transpose() + (s * s.transpose()) / sy;
    } else {
      hinv.setIdentity();
    }
    x = x_new;
    g_val = val_new;
    grad = grad_new;
    grad_norm = grad.cwiseAbs().maxCoeff();
  }

  if (info) {
    info->iterations = it;
    info->grad_norm = grad_norm;
    info->objective = g_val;
  }
  if (grad_norm >= 1e-6) {
    std::ostringstream os;
    os << "md_update_gaussian: optimizer did not converge; |grad|_inf = " << grad_norm;
    throw std::runtime_error(os.str());
  }
  // never return a point worse than staying put
  const double at_current = objective(project(current.flatten()));
  if (g_val > at_current + 1e-9) return current;
  return GaussianPolicyParams::unflatten(x, d);
}

}  // namespace mdirl
