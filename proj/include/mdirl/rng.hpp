#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>

namespace mdirl {

// Seeded random stream. All sampling is hand-rolled on top of the (fully
// specified) mt19937_64 engine so that a given seed reproduces the same
// draws on any platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. Two uniforms per draw, no cached spare.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vec(int d) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z(i) = normal();
    return z;
  }

  // Index sampled from an inclusive-prefix CDF (last entry ~ 1).
  int from_cdf(const Eigen::VectorXd& cdf) {
    const double u = uniform();
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (cdf(mid) <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  int categorical(const Eigen::VectorXd& probs) {
    Eigen::VectorXd cdf(probs.size());
    double acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
      acc += probs(i);
      cdf(i) = acc;
    }
    cdf(probs.size() - 1) = 1.0;
    return from_cdf(cdf);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

inline Eigen::VectorXd cumulative(const Eigen::VectorXd& probs) {
  Eigen::VectorXd cdf(probs.size());
  double acc = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    acc += probs(i);
    cdf(i) = acc;
  }
  if (probs.size() > 0) cdf(probs.size() - 1) = 1.0;
  return cdf;
}

}  // namespace mdirl
