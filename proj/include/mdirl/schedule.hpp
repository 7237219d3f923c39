#pragma once

#include <string>

namespace mdirl {

// Step-size rule producing eta_t for t = 1, 2, ...
//   constant(eta)                eta_t = eta
//   harmonic(c)                  eta_t = c / (t + 1)
//   linear_alpha(a1, aT, T)      alpha_t = a1 + (t-1)(aT - a1)/(T-1),
//                                eta_t = 1 / alpha_t, defined for t <= T
class StepSchedule {
 public:
  enum class Kind { constant, harmonic, linear_alpha };

  static StepSchedule constant(double eta);
  static StepSchedule harmonic(double c);
  static StepSchedule linear_alpha(double alpha1, double alphaT, int total_steps);

  // Parses "constant:<eta>", "harmonic:<c>", "linear_alpha:<a1>,<aT>,<T>".
  static StepSchedule parse(const std::string& spec);
  std::string to_string() const;

  double eta(int t) const;

  Kind kind() const { return kind_; }
  int total_steps() const { return total_steps_; }

  bool operator==(const StepSchedule& o) const {
    return kind_ == o.kind_ && a_ == o.a_ && b_ == o.b_ && total_steps_ == o.total_steps_;
  }

 private:
  StepSchedule(Kind kind, double a, double b, int T)
      : kind_(kind), a_(a), b_(b), total_steps_(T) {}
  Kind kind_;
  double a_, b_;
  int total_steps_;
};

}  // namespace mdirl
