#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdirl/environments.hpp"
#include "oracles.hpp"

using namespace mdirl;

TEST_CASE("bandit expert sampling") {
  SUBCASE("a dominant logit captures the whole batch") {
    Rng rng(301);
    BanditSpec spec = BanditSpec::make(10, rng);
    spec.expert_logits(3) = 20.0;
    Rng draw(302);
    const auto batch = sample_expert_bandit(spec, draw);
    CHECK(batch.size() == 16);
    for (const int a : batch) CHECK(a == 3);
  }
  SUBCASE("uniform logits give near-uniform aggregate frequencies") {
    Rng rng(303);
    BanditSpec spec = BanditSpec::make(10, rng, 16, 0.1, 0.0);  // zero-scale logits
    Rng draw(304);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(10);
    const int rounds = 7000;  // ~ 1e5 draws
    for (int i = 0; i < rounds; ++i)
      for (const int a : sample_expert_bandit(spec, draw)) counts(a) += 1.0;
    counts /= counts.sum();
    CHECK((counts.array() - 0.1).abs().maxCoeff() < 0.01 * 1.0);
  }
  SUBCASE("fixed seed reproduces the draws") {
    Rng rng(305);
    const BanditSpec spec = BanditSpec::make(100, rng);
    Rng a(1), b(1);
    CHECK(sample_expert_bandit(spec, a) == sample_expert_bandit(spec, b));
  }
}

TEST_CASE("fit_reference_discrete") {
  const ProbVector prev = ProbVector::uniform(4);
  SUBCASE("mass shifts toward the observed action, monotone in lr") {
    const std::vector<int> batch(16, 0);
    double last = prev[0];
    for (const double lr : {0.1, 0.3, 0.6, 1.0}) {
      const ProbVector fit = fit_reference_discrete(prev, batch, 4, 0.1, lr);
      CHECK(fit[0] > last);
      last = fit[0];
    }
  }
  SUBCASE("lr = 0 returns prev") {
    const ProbVector fit = fit_reference_discrete(prev, {1, 2, 3}, 4, 0.1, 0.0);
    CHECK((fit.vec() - prev.vec()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("lr = 1 with a large batch approaches the sampling distribution") {
    Rng rng(307);
    BanditSpec spec = BanditSpec::make(5, rng, 20000, 0.1, 1.0);
    const ProbVector truth = spec.expert_policy();
    const auto batch = sample_expert_bandit(spec, rng);
    const ProbVector fit = fit_reference_discrete(ProbVector::uniform(5), batch, 5, 0.1, 1.0);
    // multinomial standard error per coordinate at n = 20000 is <= 0.0036
    CHECK((fit.vec() - truth.vec()).cwiseAbs().maxCoeff() < 4.0 * 0.0036);
  }
  SUBCASE("empty batch throws") {
    CHECK_THROWS_AS(fit_reference_discrete(prev, {}, 4, 0.1, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("fit_reference_gaussian") {
  Rng rng(311);
  const GaussianPolicyParams prev = GaussianPolicyParams::standard(2);
  SUBCASE("lr = 0 returns prev") {
    std::vector<Eigen::VectorXd> batch{rng.normal_vec(2), rng.normal_vec(2)};
    const GaussianPolicyParams fit = fit_reference_gaussian(prev, batch, 0.0);
    CHECK((fit.flatten() - prev.flatten()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("lr = 1 with a huge batch recovers the generator") {
    const LdlCovariance cov = LdlCovariance::make(
        (Eigen::VectorXd(1) << 0.4).finished(),
        (Eigen::VectorXd(2) << std::log(0.8), std::log(1.2)).finished());
    const GaussianPolicyParams truth{(Eigen::VectorXd(2) << 3.0, -2.0).finished(), cov};
    std::vector<Eigen::VectorXd> batch;
    Rng draw(313);
    for (int i = 0; i < 50000; ++i) batch.push_back(sample_action(truth, draw));
    const GaussianPolicyParams fit = fit_reference_gaussian(prev, batch, 1.0);
    CHECK((fit.mean - truth.mean).cwiseAbs().maxCoeff() < 0.03);
    CHECK((fit.cov.compose() - truth.cov.compose()).cwiseAbs().maxCoeff() < 0.05);
  }
  SUBCASE("identical points fall back to the sigma floor without crashing") {
    std::vector<Eigen::VectorXd> batch(5, (Eigen::VectorXd(2) << 1.0, 1.0).finished());
    const GaussianPolicyParams fit = fit_reference_gaussian(prev, batch, 1.0);
    CHECK(fit.cov.sigma().minCoeff() == doctest::Approx(kSigmaMin));
  }
}

TEST_CASE("corrupt_demos") {
  Rng rng(317);
  SUBCASE("epsilon = 0 is the identity") {
    std::vector<Eigen::VectorXd> acts{rng.normal_vec(3), rng.normal_vec(3)};
    const auto out = corrupt_demos(acts, NoiseSpec{0.0}, rng);
    for (size_t i = 0; i < acts.size(); ++i)
      CHECK((out[i] - acts[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("epsilon = 0.5 inflates the variance by epsilon^2") {
    const int n = 100000;
    std::vector<Eigen::VectorXd> zeros(n, Eigen::VectorXd::Zero(1));
    Rng noise_rng(319);
    const auto out = corrupt_demos(zeros, NoiseSpec{0.5}, noise_rng);
    double var = 0.0;
    for (const auto& a : out) var += a(0) * a(0);
    var /= n;
    CHECK(std::abs(var - 0.25) / 0.25 < 0.05);
  }
  SUBCASE("epsilon = 0.01 stays close to the identity") {
    const int n = 10000;
    std::vector<Eigen::VectorXd> zeros(n, Eigen::VectorXd::Zero(1));
    Rng noise_rng(323);
    const auto out = corrupt_demos(zeros, NoiseSpec{0.01}, noise_rng);
    double worst = 0.0;
    for (const auto& a : out) worst = std::max(worst, std::abs(a(0)));
    CHECK(worst < 0.06);  // 6 sigma at eps = 0.01
  }
}

TEST_CASE("reference processes are seed-deterministic") {
  Rng ra(331), rb(331);
  BanditSpec sa = BanditSpec::make(20, ra);
  BanditSpec sb = BanditSpec::make(20, rb);
  CHECK((sa.expert_logits - sb.expert_logits).cwiseAbs().maxCoeff() == 0.0);
  ProbVector pa = ProbVector::uniform(20), pb = ProbVector::uniform(20);
  for (int t = 0; t < 20; ++t) {
    pa = fit_reference_discrete(pa, sample_expert_bandit(sa, ra), 20, 0.1, 0.4);
    pb = fit_reference_discrete(pb, sample_expert_bandit(sb, rb), 20, 0.1, 0.4);
  }
  CHECK((pa.vec() - pb.vec()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("estimation error shrinks with batch size") {
  // lr = 1 single-shot estimates at batch sizes 16, 256, 4096, averaged
  // over seeds: the mean L1 error must decrease monotonically.
  Rng spec_rng(337);
  const BanditSpec base = BanditSpec::make(10, spec_rng);
  const ProbVector truth = base.expert_policy();
  std::vector<double> mean_err;
  for (const int bs : {16, 256, 4096}) {
    double err = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
      BanditSpec spec = base;
      spec.samples_per_round = bs;
      Rng draw(1000 + seed);
      const auto batch = sample_expert_bandit(spec, draw);
      const ProbVector fit =
          fit_reference_discrete(ProbVector::uniform(10), batch, 10, 0.1, 1.0);
      err += (fit.vec() - truth.vec()).cwiseAbs().sum();
    }
    mean_err.push_back(err / 20.0);
  }
  CHECK(mean_err[1] < mean_err[0]);
  CHECK(mean_err[2] < mean_err[1]);
}

TEST_CASE("gaussian toy spec invariants") {
  const GaussianToySpec spec = GaussianToySpec::make();
  CHECK(spec.expert.mean(0) == doctest::Approx(5.0));
  CHECK(spec.expert.mean(1) == doctest::Approx(3.0));
  CHECK(spec.expert.cov.compose().determinant() < 1.0);
}
