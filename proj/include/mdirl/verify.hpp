#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mdirl/bregman.hpp"

namespace mdirl {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst residual or margin observed
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
  std::string to_string() const;
};

using GradFn = std::function<DualVector(const ProbVector&, const Regularizer&)>;

// Residual of the three-point identity
//   <grad(pa) - grad(pb), pc - pb> = D(pc||pb) - D(pc||pa) + D(pb||pa)
// with an injectable gradient, so a corrupted gradient is detectable.
double three_point_residual(const Regularizer& reg, const ProbVector& pa,
                            const ProbVector& pb, const ProbVector& pc,
                            const GradFn& grad = {});

// Residual of D(p||q) + D(q||p) = <grad(p) - grad(q), p - q>.
double two_point_residual(const Regularizer& reg, const ProbVector& p,
                          const ProbVector& q, const GradFn& grad = {});

// Runs every module's fixed-seed property checks and reports one line per
// lemma/theorem-style check.
VerifyReport verify_suite(std::uint64_t seed = 20240817);

}  // namespace mdirl
