#include "mdirl/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "mdirl/environments.hpp"
#include "mdirl/gaussian.hpp"
#include "mdirl/mdp.hpp"
#include "mdirl/rng.hpp"
#include "mdirl/tabular.hpp"

namespace mdirl {

bool VerifyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string VerifyReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "[ok]   " : "[FAIL] ") << c.name << "  worst=" << c.worst;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  os << (all_pass() ? "verify: all checks passed" : "verify: FAILURES present") << "\n";
  return os.str();
}

double three_point_residual(const Regularizer& reg, const ProbVector& pa,
                            const ProbVector& pb, const ProbVector& pc,
                            const GradFn& grad) {
  const GradFn g = grad ? grad : GradFn([](const ProbVector& p, const Regularizer& r) {
    return grad_omega(p, r);
  });
  const double lhs = (g(pa, reg) - g(pb, reg)).dot(pc.vec() - pb.vec());
  const double rhs = bregman_div(pc, pb, reg) - bregman_div(pc, pa, reg) +
                     bregman_div(pb, pa, reg);
  return std::abs(lhs - rhs);
}

double two_point_residual(const Regularizer& reg, const ProbVector& p,
                          const ProbVector& q, const GradFn& grad) {
  const GradFn g = grad ? grad : GradFn([](const ProbVector& pp, const Regularizer& r) {
    return grad_omega(pp, r);
  });
  const double lhs = bregman_div(p, q, reg) + bregman_div(q, p, reg);
  const double rhs = (g(p, reg) - g(q, reg)).dot(p.vec() - q.vec());
  return std::abs(lhs - rhs);
}

namespace {

std::vector<Regularizer> all_regularizers() {
  return {Regularizer::shannon(), Regularizer::tsallis(1.5), Regularizer::tsallis(2.0),
          Regularizer::exp(), Regularizer::cos(), Regularizer::sin()};
}

ProbVector random_prob(Rng& rng, int n, const Regularizer& reg) {
  const double cap = reg.convex_upper_limit();
  for (int tries = 0; tries < 64; ++tries) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = rng.uniform(0.05, 1.0);
    ProbVector p = ProbVector::from_weights(w);
    if (p.vec().maxCoeff() < cap - 0.02) return p;
  }
  return ProbVector::uniform(n);
}

DualVector random_dual(Rng& rng, int n, double scale) {
  DualVector y(n);
  for (int i = 0; i < n; ++i) y(i) = scale * rng.normal();
  return y;
}

struct CheckRecorder {
  VerifyReport* report;
  void add(const std::string& name, bool pass, double worst,
           const std::string& detail = "") {
    report->checks.push_back({name, pass, worst, detail});
  }
};

}  // namespace

VerifyReport verify_suite(std::uint64_t seed) {
  VerifyReport report;
  CheckRecorder rec{&report};
  const int trials = 200;

  for (const Regularizer& reg : all_regularizers()) {
    Rng rng(seed);
    const std::string tag = std::string("[") + reg.to_string() + "]";

    double worst3 = 0.0, worst2 = 0.0, worst_round = 0.0, worst_shift = 0.0;
    double worst_grad = 0.0, worst_nonneg = 0.0, worst_convex = 1e300;
    for (int i = 0; i < trials; ++i) {
      const int n = 2 + static_cast<int>(rng.uniform() * 6.99);
      const ProbVector pa = random_prob(rng, n, reg);
      const ProbVector pb = random_prob(rng, n, reg);
      const ProbVector pc = random_prob(rng, n, reg);
      worst3 = std::max(worst3, three_point_residual(reg, pa, pb, pc));
      worst2 = std::max(worst2, two_point_residual(reg, pa, pb));
      worst_nonneg = std::min(worst_nonneg, bregman_div(pa, pb, reg));

      const ProbVector round = grad_omega_star(reward_operator_psi(pa, reg), reg);
      worst_round =
          std::max(worst_round, (round.vec() - pa.vec()).cwiseAbs().maxCoeff());

      const DualVector y = random_dual(rng, n, 1.0);
      const double shift = rng.uniform(-3.0, 3.0);
      const ProbVector s1 = grad_omega_star(y, reg);
      const ProbVector s2 = grad_omega_star(y.array() + shift, reg);
      worst_shift = std::max(worst_shift, (s1.vec() - s2.vec()).cwiseAbs().maxCoeff());

      // central differences of omega against grad_omega
      const DualVector g = grad_omega(pa, reg);
      for (int j = 0; j < n; ++j) {
        const double h = 1e-6;
        Eigen::VectorXd vp = pa.vec(), vm = pa.vec();
        vp(j) += h;
        vm(j) -= h;
        double fd = 0.0;
        for (int a = 0; a < n; ++a) fd += reg.f(vp(a)) - reg.f(vm(a));  // offsets cancel
        fd /= 2.0 * h;
        worst_grad = std::max(worst_grad, std::abs(fd - g(j)) /
                                              std::max(1.0, std::abs(g(j))));
      }

      // strict convexity along a random chord
      const double lam = rng.uniform(0.2, 0.8);
      const Eigen::VectorXd mid = lam * pa.vec() + (1.0 - lam) * pb.vec();
      double omega_mid = reg.offset();
      for (int a = 0; a < n; ++a) omega_mid += reg.f(mid(a));
      const double gap =
          lam * omega(pa, reg) + (1.0 - lam) * omega(pb, reg) - omega_mid;
      const double sep = (pa.vec() - pb.vec()).norm();
      if (sep > 1e-3) worst_convex = std::min(worst_convex, gap);
    }
    rec.add("three_point_identity" + tag, worst3 < 1e-9, worst3);
    rec.add("two_point_identity" + tag, worst2 < 1e-9, worst2);
    rec.add("lemma1_round_trip" + tag, worst_round < 1e-6, worst_round);
    rec.add("shift_invariance" + tag, worst_shift < 1e-9, worst_shift);
    rec.add("gradient_check" + tag, worst_grad < 1e-5, worst_grad);
    rec.add("divergence_nonnegative" + tag, worst_nonneg > -1e-12, worst_nonneg);
    rec.add("strict_convexity" + tag, worst_convex > 0.0, worst_convex);
  }

  {
    // shannon divergence equals an independently coded KL
    Rng rng(seed + 1);
    const Regularizer sh = Regularizer::shannon();
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
      const int n = 2 + static_cast<int>(rng.uniform() * 6.99);
      const ProbVector p = random_prob(rng, n, sh);
      const ProbVector q = random_prob(rng, n, sh);
      double kl = 0.0;
      for (int a = 0; a < n; ++a) kl += p[a] * std::log(p[a] / q[a]);
      worst = std::max(worst, std::abs(kl - bregman_div(p, q, sh)));
    }
    rec.add("shannon_matches_kl", worst < 1e-10, worst);
  }

  {
    // tsallis q -> 1 approaches the shannon kernel
    Rng rng(seed + 2);
    const double dq = 1e-4;
    const Regularizer near = Regularizer::tsallis(1.0 + dq);
    const Regularizer sh = Regularizer::shannon();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const ProbVector p = random_prob(rng, 4, sh);
      worst = std::max(worst, std::abs(omega(p, near) - omega(p, sh)));
    }
    rec.add("tsallis_q_to_1_limit", worst < 10.0 * dq, worst);
  }

  for (const Regularizer& reg : all_regularizers()) {
    // dual-step identity and monotone pull across random MD steps
    Rng rng(seed + 3);
    const std::string tag = std::string("[") + reg.to_string() + "]";
    double worst_dual = 0.0, worst_pull = -1e300;
    for (int i = 0; i < 50; ++i) {
      const int n = 3 + static_cast<int>(rng.uniform() * 4.99);
      TabularPolicy cur({random_prob(rng, n, reg)});
      TabularPolicy bar({random_prob(rng, n, reg)});
      const double eta = rng.uniform(0.05, 1.0);
      const MdStepResult step = md_step_tabular(cur, bar, eta, reg);
      if (!step.clamped) {
        worst_dual = std::max(worst_dual, step.max_dual_residual);
        const double pull = bregman_div(step.policy.row(0), bar.row(0), reg) -
                            bregman_div(cur.row(0), bar.row(0), reg);
        worst_pull = std::max(worst_pull, pull);
      }
    }
    rec.add("dual_step_identity" + tag, worst_dual < 1e-8, worst_dual);
    rec.add("monotone_target_pull" + tag, worst_pull <= 1e-12, worst_pull);
  }

  {
    // LDL round trip and dense-oracle agreement
    Rng rng(seed + 4);
    double worst_rt = 0.0, worst_inv = 0.0, worst_det = 0.0;
    for (int i = 0; i < 50; ++i) {
      const int d = 1 + static_cast<int>(rng.uniform() * 5.99);
      Eigen::VectorXd lower(d * (d - 1) / 2), ls(d);
      for (int j = 0; j < lower.size(); ++j) lower(j) = rng.uniform(-0.9, 0.9);
      for (int j = 0; j < d; ++j) ls(j) = rng.uniform(-1.5, 0.5);
      const LdlCovariance cov = LdlCovariance::make(lower, ls);
      const Eigen::MatrixXd sigma = cov.compose();
      const LdlCovariance back = LdlCovariance::decompose(sigma);
      worst_rt = std::max(worst_rt,
                          (back.compose() - sigma).cwiseAbs().maxCoeff());
      worst_inv = std::max(
          worst_inv, (sigma * cov.invert() - Eigen::MatrixXd::Identity(d, d))
                         .cwiseAbs()
                         .maxCoeff());
      worst_det = std::max(worst_det,
                           std::abs(cov.logdet() - std::log(sigma.determinant())));
    }
    rec.add("ldl_round_trip", worst_rt < 1e-9, worst_rt);
    rec.add("ldl_inverse_identity", worst_inv < 1e-9, worst_inv);
    rec.add("ldl_logdet_dense", worst_det < 1e-9, worst_det);
  }

  {
    // Gaussian divergence sanity and q -> 1 continuity toward the KL
    Rng rng(seed + 5);
    double worst_zero = 0.0, worst_nonneg = 1e300, worst_cont = 0.0;
    for (int i = 0; i < 25; ++i) {
      const int d = 1 + static_cast<int>(rng.uniform() * 2.99);
      Eigen::VectorXd lower(d * (d - 1) / 2), ls(d);
      for (int j = 0; j < lower.size(); ++j) lower(j) = rng.uniform(-0.5, 0.5);
      for (int j = 0; j < d; ++j) ls(j) = rng.uniform(-0.7, 0.3);
      GaussianPolicyParams g{rng.normal_vec(d), LdlCovariance::make(lower, ls)};
      for (int j = 0; j < lower.size(); ++j) lower(j) = rng.uniform(-0.5, 0.5);
      for (int j = 0; j < d; ++j) ls(j) = rng.uniform(-0.7, 0.3);
      GaussianPolicyParams gh{rng.normal_vec(d), LdlCovariance::make(lower, ls)};

      worst_zero = std::max(
          worst_zero,
          std::abs(bregman_div_gaussian(g, g, Regularizer::tsallis(2.0))));
      worst_nonneg = std::min(
          worst_nonneg, bregman_div_gaussian(g, gh, Regularizer::tsallis(2.0)));
      const double kl = bregman_div_gaussian(g, gh, Regularizer::shannon());
      const double near =
          bregman_div_gaussian(g, gh, Regularizer::tsallis(1.0 + 1e-4));
      if (kl > 1e-3)
        worst_cont = std::max(worst_cont, std::abs(near - kl) / kl);
    }
    rec.add("gaussian_divergence_zero_at_equality", worst_zero < 1e-9, worst_zero);
    rec.add("gaussian_divergence_nonnegative", worst_nonneg > -1e-9, worst_nonneg);
    rec.add("gaussian_q_to_1_matches_kl", worst_cont < 0.01, worst_cont);
  }

  {
    // interaction integral against Monte Carlo
    Rng rng(seed + 6);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int d = 1 + i % 2;
      Eigen::VectorXd lower(d * (d - 1) / 2), ls(d);
      for (int j = 0; j < lower.size(); ++j) lower(j) = rng.uniform(-0.5, 0.5);
      for (int j = 0; j < d; ++j) ls(j) = rng.uniform(-0.5, 0.3);
      GaussianPolicyParams g{rng.normal_vec(d), LdlCovariance::make(lower, ls)};
      for (int j = 0; j < lower.size(); ++j) lower(j) = rng.uniform(-0.5, 0.5);
      for (int j = 0; j < d; ++j) ls(j) = rng.uniform(-0.5, 0.3);
      GaussianPolicyParams gh{g.mean + 0.5 * rng.normal_vec(d),
                              LdlCovariance::make(lower, ls)};
      const double q = 2.0;
      const double closed = interaction_integral(g, gh, 1.0, q - 1.0);
      double mc = 0.0;
      const int samples = 100000;
      Rng mc_rng(seed + 100 + i);
      for (int k = 0; k < samples; ++k) {
        const Eigen::VectorXd x = sample_action(g, mc_rng);
        mc += std::exp((q - 1.0) * log_density(gh, x));
      }
      mc /= samples;
      worst = std::max(worst, std::abs(closed - mc) / std::max(1e-12, mc));
    }
    rec.add("interaction_integral_monte_carlo", worst < 0.02, worst);
  }

  {
    // Eq.15-minimizer route agrees with the dual interpolation route
    Rng rng(seed + 7);
    double worst = 0.0;
    for (const Regularizer& reg :
         {Regularizer::shannon(), Regularizer::tsallis(2.0), Regularizer::exp()}) {
      for (int i = 0; i < 10; ++i) {
        const int n = 2 + static_cast<int>(rng.uniform() * 3.99);
        TabularPolicy nu({random_prob(rng, n, reg)});
        TabularPolicy th({random_prob(rng, n, reg)});
        const double eta = rng.uniform(0.1, 1.0);
        const TabularPolicy direct = mdairl_minimizer(nu, th, eta, reg);
        const MdStepResult dual = md_step_tabular(th, nu, eta, reg);
        worst = std::max(worst, (direct.row(0).vec() - dual.policy.row(0).vec())
                                    .cwiseAbs()
                                    .maxCoeff());
      }
    }
    rec.add("proximal_loss_minimizer_matches_md_step", worst < 1e-8, worst);
  }

  {
    // visitation density: solver residual and rollout frequencies
    Rng rng(seed + 8);
    const TabularMdpSpec mdp = TabularMdpSpec::gridworld(4, 0.1, 0.9);
    std::vector<ProbVector> rows;
    for (int s = 0; s < mdp.num_states; ++s)
      rows.push_back(random_prob(rng, mdp.num_actions, Regularizer::shannon()));
    const TabularPolicy pi(rows);
    const Eigen::VectorXd rho = visitation_density(mdp, pi, mdp.gamma);
    Rng roll_rng(seed + 9);
    const Eigen::VectorXd emp =
        empirical_visitation(mdp, pi, mdp.gamma, 400000, roll_rng);
    const double worst = (rho - emp).cwiseAbs().maxCoeff();
    rec.add("visitation_density_vs_rollout", worst < 0.01, worst);
  }

  {
    // exact RL inverts the reward operator on tabular policies
    Rng rng(seed + 10);
    double worst = 0.0;
    for (const Regularizer& reg : all_regularizers()) {
      for (int i = 0; i < 10; ++i) {
        const int n = 3;
        TabularPolicy pi({random_prob(rng, n, reg), random_prob(rng, n, reg)});
        std::vector<DualVector> psi;
        for (int s = 0; s < 2; ++s) psi.push_back(reward_operator_psi(pi.row(s), reg));
        const TabularPolicy back = exact_regularized_rl(psi, reg);
        for (int s = 0; s < 2; ++s)
          worst = std::max(worst,
                           (back.row(s).vec() - pi.row(s).vec()).cwiseAbs().maxCoeff());
      }
    }
    rec.add("exact_rl_inverts_reward_operator", worst < 1e-6, worst);
  }

  return report;
}

}  // namespace mdirl
