#include "mdirl/schedule.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

namespace mdirl {

StepSchedule StepSchedule::constant(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("StepSchedule: eta must be > 0");
  return {Kind::constant, eta, 0.0, 0};
}

StepSchedule StepSchedule::harmonic(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("StepSchedule: c must be > 0");
  return {Kind::harmonic, c, 0.0, 0};
}

StepSchedule StepSchedule::linear_alpha(double alpha1, double alphaT, int total_steps) {
  if (!(alpha1 > 0.0) || !(alphaT > 0.0))
    throw std::invalid_argument("StepSchedule: alpha endpoints must be > 0");
  if (total_steps < 1)
    throw std::invalid_argument("StepSchedule: total_steps must be >= 1");
  return {Kind::linear_alpha, alpha1, alphaT, total_steps};
}

double StepSchedule::eta(int t) const {
  if (t < 1) throw std::out_of_range("StepSchedule: t must be >= 1");
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::harmonic:
      return a_ / (t + 1.0);
    case Kind::linear_alpha: {
      if (t > total_steps_)
        throw std::out_of_range("StepSchedule: t exceeds configured horizon");
      const double alpha =
          total_steps_ == 1
              ? a_
              : a_ + (t - 1) * (b_ - a_) / static_cast<double>(total_steps_ - 1);
      return 1.0 / alpha;
    }
  }
  return 0.0;
}

StepSchedule StepSchedule::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::istringstream is(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(is, tok, ',')) args.push_back(std::stod(tok));
  }
  if (kind == "constant" && args.size() == 1) return constant(args[0]);
  if (kind == "harmonic" && args.size() == 1) return harmonic(args[0]);
  if (kind == "linear_alpha" && args.size() == 3)
    return linear_alpha(args[0], args[1], static_cast<int>(args[2]));
  throw std::invalid_argument("unknown schedule spec: " + spec);
}

std::string StepSchedule::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant:
      os << "constant:" << a_;
      break;
    case Kind::harmonic:
      os << "harmonic:" << a_;
      break;
    case Kind::linear_alpha:
      os << "linear_alpha:" << a_ << "," << b_ << "," << total_steps_;
      break;
  }
  return os.str();
}

}  // namespace mdirl
