#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdirl/gaussian.hpp"
#include "oracles.hpp"

using namespace mdirl;

namespace {

GaussianPolicyParams random_gaussian(Rng& rng, int d, double mean_scale = 1.0) {
  Eigen::VectorXd lower(d * (d - 1) / 2), ls(d);
  for (int i = 0; i < lower.size(); ++i) lower(i) = rng.uniform(-0.6, 0.6);
  for (int i = 0; i < d; ++i) ls(i) = rng.uniform(-0.7, 0.4);
  return {mean_scale * rng.normal_vec(d), LdlCovariance::make(lower, ls)};
}

}  // namespace

TEST_CASE("ldl covariance linear algebra") {
  SUBCASE("identity") {
    const LdlCovariance c = LdlCovariance::identity(3);
    CHECK((c.compose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c.invert() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.logdet() == 0.0);
  }
  SUBCASE("worked 2x2 example") {
    const LdlCovariance c = LdlCovariance::make(
        (Eigen::VectorXd(1) << 0.5).finished(),
        (Eigen::VectorXd(2) << 0.0, std::log(2.0)).finished());
    const Eigen::MatrixXd sigma = c.compose();
    CHECK(sigma(0, 0) == doctest::Approx(1.0));
    CHECK(sigma(0, 1) == doctest::Approx(0.5));
    CHECK(sigma(1, 0) == doctest::Approx(0.5));
    CHECK(sigma(1, 1) == doctest::Approx(4.25));
    CHECK(c.logdet() == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("compose, invert, logdet against dense oracles") {
    Rng rng(101);
    for (int i = 0; i < 100; ++i) {
      const int d = 1 + static_cast<int>(rng.uniform() * 7.99);
      const GaussianPolicyParams g = random_gaussian(rng, d);
      const Eigen::MatrixXd sigma = g.cov.compose();
      const Eigen::MatrixXd prod = sigma * g.cov.invert();
      CHECK((prod - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(std::abs(g.cov.logdet() - std::log(sigma.determinant())) < 1e-9);
    }
  }
  SUBCASE("decompose round trips") {
    Rng rng(103);
    for (int i = 0; i < 50; ++i) {
      const int d = 2 + static_cast<int>(rng.uniform() * 4.99);
      const GaussianPolicyParams g = random_gaussian(rng, d);
      const LdlCovariance back = LdlCovariance::decompose(g.cov.compose());
      CHECK((back.lower() - g.cov.lower()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((back.log_sigma() - g.cov.log_sigma()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("sigma is clipped into its bounds") {
    const LdlCovariance c = LdlCovariance::make(
        Eigen::VectorXd::Zero(0).eval(), (Eigen::VectorXd(1) << 10.0).finished());
    CHECK(c.sigma()(0) == doctest::Approx(kSigmaMax));
  }
}

TEST_CASE("log partition") {
  SUBCASE("standard normal") {
    CHECK(log_partition(GaussianPolicyParams::standard(1)) ==
          doctest::Approx(0.918939).epsilon(1e-6));
    CHECK(log_partition(GaussianPolicyParams::standard(2)) ==
          doctest::Approx(1.837877).epsilon(1e-6));
  }
  SUBCASE("mean shift adds the quadratic term") {
    GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    g.mean(0) = 2.0;
    CHECK(log_partition(g) == doctest::Approx(2.0 + 0.918939).epsilon(1e-6));
  }
  SUBCASE("natural parameter route agrees") {
    Rng rng(107);
    for (int i = 0; i < 20; ++i) {
      const GaussianPolicyParams g = random_gaussian(rng, 3);
      CHECK(log_partition(natural_params(g)) ==
            doctest::Approx(log_partition(g)).epsilon(1e-10));
    }
  }
  SUBCASE("density normalizes (monte carlo importance check)") {
    // E_g[1] trivially; instead check exp{<theta,t(x)> - F} against the density
    Rng rng(109);
    const GaussianPolicyParams g = random_gaussian(rng, 2);
    const NaturalParams th = natural_params(g);
    const double F = log_partition(th);
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd x = sample_action(g, rng);
      const double inner =
          th.theta1.dot(x) + (th.theta2 * (x * x.transpose())).trace();
      CHECK(inner - F == doctest::Approx(log_density(g, x)).epsilon(1e-9));
    }
  }
  SUBCASE("indefinite theta2 is rejected") {
    NaturalParams bad{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
    CHECK_THROWS_AS(log_partition(bad), std::runtime_error);
  }
}

TEST_CASE("interaction integral") {
  SUBCASE("normalization cases") {
    Rng rng(113);
    const GaussianPolicyParams g = random_gaussian(rng, 2);
    const GaussianPolicyParams gh = random_gaussian(rng, 2);
    CHECK(interaction_integral(g, g, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(interaction_integral(g, gh, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("squared standard normal integrates to 1/(2 sqrt(pi))") {
    const GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    CHECK(interaction_integral(g, g, 2.0, 0.0) ==
          doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))).epsilon(1e-10));
  }
  SUBCASE("monte carlo agreement across random pairs") {
    Rng rng(127);
    for (int i = 0; i < 6; ++i) {
      const int d = 1 + i % 3;
      const GaussianPolicyParams g = random_gaussian(rng, d, 0.7);
      GaussianPolicyParams gh = random_gaussian(rng, d, 0.7);
      gh.mean = g.mean + 0.5 * rng.normal_vec(d);
      const double q = i % 2 == 0 ? 1.5 : 2.0;
      const double closed = interaction_integral(g, gh, 1.0, q - 1.0);
      const double mc = oracles::mc_expectation(
          g,
          [&](const Eigen::VectorXd& x) {
            return std::exp((q - 1.0) * log_density(gh, x));
          },
          100000, 555 + i);
      CHECK(std::abs(closed - mc) / mc < 0.02);
    }
  }
  SUBCASE("inadmissible combination throws") {
    const GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    CHECK_THROWS_AS(interaction_integral(g, g, -2.0, 0.5), std::invalid_argument);
  }
}

TEST_CASE("gaussian tsallis entropy") {
  SUBCASE("standard normal, q=2") {
    CHECK(tsallis_entropy_gaussian(GaussianPolicyParams::standard(1), 2.0) ==
          doctest::Approx(1.0 - 1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-10));
  }
  SUBCASE("monte carlo of the defining expectation") {
    Rng rng(131);
    for (int i = 0; i < 4; ++i) {
      const int d = 1 + i % 2;
      const GaussianPolicyParams g = random_gaussian(rng, d);
      const double q = i % 2 == 0 ? 2.0 : 1.5;
      const double closed = tsallis_entropy_gaussian(g, q);
      const double mc = oracles::mc_expectation(
          g,
          [&](const Eigen::VectorXd& x) {
            return (1.0 - std::exp((q - 1.0) * log_density(g, x))) / (q - 1.0);
          },
          100000, 777 + i);
      CHECK(std::abs(closed - mc) / std::abs(mc) < 0.02);
    }
  }
  SUBCASE("entropy grows with spread") {
    GaussianPolicyParams small = GaussianPolicyParams::standard(1);
    GaussianPolicyParams big = small;
    big.cov = LdlCovariance::make(Eigen::VectorXd::Zero(0).eval(),
                                  (Eigen::VectorXd(1) << std::log(1.5)).finished());
    CHECK(tsallis_entropy_gaussian(big, 2.0) > tsallis_entropy_gaussian(small, 2.0));
  }
  SUBCASE("q -> 1 approaches shannon differential entropy") {
    const double sigma = 1.3;
    GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    g.cov = LdlCovariance::make(Eigen::VectorXd::Zero(0).eval(),
                                (Eigen::VectorXd(1) << std::log(sigma)).finished());
    const double shannon_entropy = 0.5 * std::log(2.0 * M_PI * M_E * sigma * sigma);
    const double dq = 1e-5;
    CHECK(std::abs(tsallis_entropy_gaussian(g, 1.0 + dq) - shannon_entropy) < 1e-3);
  }
  SUBCASE("q <= 1 throws") {
    CHECK_THROWS_AS(tsallis_entropy_gaussian(GaussianPolicyParams::standard(1), 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("gaussian bregman divergence") {
  SUBCASE("zero at equality") {
    Rng rng(137);
    const GaussianPolicyParams g = random_gaussian(rng, 2);
    CHECK(std::abs(bregman_div_gaussian(g, g, Regularizer::shannon())) < 1e-10);
    CHECK(std::abs(bregman_div_gaussian(g, g, Regularizer::tsallis(2.0))) < 1e-10);
  }
  SUBCASE("shannon case is the gaussian KL: unit-variance mean shift") {
    GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    GaussianPolicyParams gh = g;
    gh.mean(0) = 1.0;
    CHECK(bregman_div_gaussian(g, gh, Regularizer::shannon()) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("shannon case matches the dense KL oracle") {
    Rng rng(139);
    for (int i = 0; i < 30; ++i) {
      const int d = 1 + static_cast<int>(rng.uniform() * 2.99);
      const GaussianPolicyParams g = random_gaussian(rng, d);
      const GaussianPolicyParams gh = random_gaussian(rng, d);
      const double kl = oracles::gaussian_kl(g.mean, g.cov.compose(), gh.mean,
                                             gh.cov.compose());
      CHECK(bregman_div_gaussian(g, gh, Regularizer::shannon()) ==
            doctest::Approx(kl).epsilon(1e-9));
    }
  }
  SUBCASE("tsallis case matches monte carlo of the defining integral") {
    Rng rng(149);
    const double q = 2.0;
    const Regularizer reg = Regularizer::tsallis(q);
    const auto phi = [&](double dens) { return (1.0 - dens) / (q - 1.0); };
    const auto fprime = [&](double dens) { return q * phi(dens) - 1.0; };
    for (int i = 0; i < 4; ++i) {
      const int d = 1 + i % 2;
      const GaussianPolicyParams g = random_gaussian(rng, d, 0.8);
      GaussianPolicyParams gh = random_gaussian(rng, d, 0.8);
      gh.mean = g.mean + rng.normal_vec(d);
      const double closed = bregman_div_gaussian(g, gh, reg);
      const double part1 = oracles::mc_expectation(
          g,
          [&](const Eigen::VectorXd& x) {
            return fprime(std::exp(log_density(gh, x))) -
                   phi(std::exp(log_density(g, x)));
          },
          100000, 901 + i);
      const double part2 = oracles::mc_expectation(
          gh,
          [&](const Eigen::VectorXd& x) {
            return fprime(std::exp(log_density(gh, x))) -
                   phi(std::exp(log_density(gh, x)));
          },
          100000, 907 + i);
      const double mc = part1 - part2;
      CHECK(std::abs(closed - mc) < 0.02 * std::max(std::abs(closed), 0.05));
    }
  }
  SUBCASE("nonnegative on random pairs, q in {1.5, 2}") {
    Rng rng(151);
    for (int i = 0; i < 50; ++i) {
      const int d = 1 + i % 3;
      const GaussianPolicyParams g = random_gaussian(rng, d);
      const GaussianPolicyParams gh = random_gaussian(rng, d);
      CHECK(bregman_div_gaussian(g, gh, Regularizer::tsallis(1.5)) > -1e-9);
      CHECK(bregman_div_gaussian(g, gh, Regularizer::tsallis(2.0)) > -1e-9);
    }
  }
  SUBCASE("q -> 1 continuity toward the KL") {
    Rng rng(157);
    for (int i = 0; i < 10; ++i) {
      const GaussianPolicyParams g = random_gaussian(rng, 2);
      const GaussianPolicyParams gh = random_gaussian(rng, 2);
      const double kl = bregman_div_gaussian(g, gh, Regularizer::shannon());
      const double near = bregman_div_gaussian(g, gh, Regularizer::tsallis(1.0 + 1e-4));
      if (kl > 1e-3) CHECK(std::abs(near - kl) / kl < 0.01);
    }
  }
}

TEST_CASE("psi_gaussian") {
  SUBCASE("q=1, k=1 is the log density") {
    const GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    CHECK(psi_gaussian(g, Eigen::VectorXd::Zero(1), 1.0, 1.0) ==
          doctest::Approx(-0.918939).epsilon(1e-6));
    Rng rng(163);
    for (int i = 0; i < 10; ++i) {
      const GaussianPolicyParams h = random_gaussian(rng, 2);
      const Eigen::VectorXd a = rng.normal_vec(2);
      CHECK(std::abs(psi_gaussian(h, a, 1.0, 1.0) - log_density(h, a)) < 1e-10);
    }
  }
  SUBCASE("q=2 mode value exceeds off-mode value") {
    const GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    const double at_mode = psi_gaussian(g, Eigen::VectorXd::Zero(1), 2.0, 1.0);
    const double off = psi_gaussian(g, (Eigen::VectorXd(1) << 1.5).finished(), 2.0, 1.0);
    CHECK(at_mode > off);
  }
  SUBCASE("q=2 compositional oracle at the standard normal mode") {
    const GaussianPolicyParams g = GaussianPolicyParams::standard(1);
    const double dens = 1.0 / std::sqrt(2.0 * M_PI);
    const double t2 = tsallis_entropy_gaussian(g, 2.0, 1.0);
    // psi = -q phi(pi(a)) + (q-1) T_q with phi(x) = (1 - x)/(q - 1)
    const double expected = -2.0 * (1.0 - dens) + t2;
    CHECK(psi_gaussian(g, Eigen::VectorXd::Zero(1), 2.0, 1.0) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("sampling") {
  SUBCASE("fixed seed reproduces the sequence") {
    Rng a(42), b(42);
    const GaussianPolicyParams g = GaussianPolicyParams::standard(2);
    for (int i = 0; i < 10; ++i) {
      CHECK((sample_action(g, a) - sample_action(g, b)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("moments of a correlated 2d gaussian") {
    Rng rng(167);
    const LdlCovariance cov = LdlCovariance::make(
        (Eigen::VectorXd(1) << 0.7).finished(),
        (Eigen::VectorXd(2) << std::log(0.9), std::log(0.6)).finished());
    const GaussianPolicyParams g{(Eigen::VectorXd(2) << 2.0, -1.0).finished(), cov};
    const int n = 100000;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd x = sample_action(g, rng);
      mean += x;
      second += x * x.transpose();
    }
    mean /= n;
    const Eigen::MatrixXd cov_emp = second / n - mean * mean.transpose();
    const Eigen::MatrixXd sigma = g.cov.compose();
    // mean within 3 standard errors per coordinate
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt(sigma(j, j) / n);
      CHECK(std::abs(mean(j) - g.mean(j)) < 3.0 * se);
    }
    CHECK(std::abs(cov_emp(0, 1) - sigma(0, 1)) / std::abs(sigma(0, 1)) < 0.05);
    CHECK(std::abs(cov_emp(0, 0) - sigma(0, 0)) / sigma(0, 0) < 0.05);
    CHECK(std::abs(cov_emp(1, 1) - sigma(1, 1)) / sigma(1, 1) < 0.05);
  }
}

TEST_CASE("gaussian md update") {
  SUBCASE("eta=0 returns current, eta=1 returns target (shannon)") {
    Rng rng(173);
    const GaussianPolicyParams cur = random_gaussian(rng, 2);
    const GaussianPolicyParams tgt = random_gaussian(rng, 2);
    const GaussianPolicyParams at0 =
        md_update_gaussian(cur, tgt, 0.0, Regularizer::shannon());
    CHECK((at0.flatten() - cur.flatten()).cwiseAbs().maxCoeff() < 1e-9);
    const GaussianPolicyParams at1 =
        md_update_gaussian(cur, tgt, 1.0, Regularizer::shannon());
    CHECK((at1.flatten() - tgt.flatten()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("natural-parameter midpoint of equal-variance gaussians") {
    GaussianPolicyParams cur = GaussianPolicyParams::standard(1);
    GaussianPolicyParams tgt = cur;
    tgt.mean(0) = 4.0;
    const GaussianPolicyParams mid =
        md_update_gaussian(cur, tgt, 0.5, Regularizer::shannon());
    CHECK(mid.mean(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(mid.cov.sigma()(0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("tsallis step decreases the proximal objective") {
    Rng rng(179);
    const Regularizer reg = Regularizer::tsallis(2.0);
    for (int i = 0; i < 5; ++i) {
      const GaussianPolicyParams cur = random_gaussian(rng, 2, 0.5);
      const GaussianPolicyParams tgt = random_gaussian(rng, 2, 0.5);
      const double eta = rng.uniform(0.1, 1.0);
      GaussianMdInfo info;
      const GaussianPolicyParams next = md_update_gaussian(cur, tgt, eta, reg, &info);
      const auto objective = [&](const GaussianPolicyParams& p) {
        return eta * bregman_div_gaussian(p, tgt, reg) +
               (1.0 - eta) * bregman_div_gaussian(p, cur, reg);
      };
      CHECK(info.grad_norm < 1e-6);
      CHECK(objective(next) <= objective(cur) + 1e-9);
      CHECK(objective(next) <= objective(tgt) + 1e-9);
    }
  }
  SUBCASE("tsallis eta=0 and eta=1 endpoints") {
    Rng rng(181);
    const Regularizer reg = Regularizer::tsallis(2.0);
    const GaussianPolicyParams cur = random_gaussian(rng, 2, 0.5);
    const GaussianPolicyParams tgt = random_gaussian(rng, 2, 0.5);
    const GaussianPolicyParams at0 = md_update_gaussian(cur, tgt, 0.0, reg);
    CHECK(bregman_div_gaussian(at0, cur, reg) < 1e-8);
    const GaussianPolicyParams at1 = md_update_gaussian(cur, tgt, 1.0, reg);
    CHECK(bregman_div_gaussian(at1, tgt, reg) < 1e-8);
  }
  SUBCASE("overly aggressive extrapolation is rejected") {
    GaussianPolicyParams cur = GaussianPolicyParams::standard(1);
    GaussianPolicyParams tgt = cur;
    tgt.cov = LdlCovariance::make(Eigen::VectorXd::Zero(0).eval(),
                                  (Eigen::VectorXd(1) << std::log(1.9)).finished());
    // precision of the eta-extrapolated natural parameter turns negative
    CHECK_THROWS_AS(md_update_gaussian(cur, tgt, 5.0, Regularizer::shannon()),
                    std::runtime_error);
  }
  SUBCASE("finite-difference gradient of the tsallis objective is consistent") {
    Rng rng(191);
    const Regularizer reg = Regularizer::tsallis(2.0);
    const GaussianPolicyParams cur = random_gaussian(rng, 2, 0.5);
    const GaussianPolicyParams tgt = random_gaussian(rng, 2, 0.5);
    const double eta = 0.4;
    const auto objective = [&](const Eigen::VectorXd& flat) {
      const GaussianPolicyParams p = GaussianPolicyParams::unflatten(flat, 2);
      return eta * bregman_div_gaussian(p, tgt, reg) +
             (1.0 - eta) * bregman_div_gaussian(p, cur, reg);
    };
    const GaussianPolicyParams opt = md_update_gaussian(cur, tgt, eta, reg);
    const Eigen::VectorXd g = oracles::finite_diff(objective, opt.flatten(), 1e-5);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("flatten round trip") {
  Rng rng(193);
  const GaussianPolicyParams g = random_gaussian(rng, 3);
  const GaussianPolicyParams back = GaussianPolicyParams::unflatten(g.flatten(), 3);
  CHECK((back.flatten() - g.flatten()).cwiseAbs().maxCoeff() == 0.0);
}
