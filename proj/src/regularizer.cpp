#include "mdirl/regularizer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdirl {

namespace {

constexpr double kHalfPi = M_PI / 2.0;

// Root of d2f for the sin kernel: pi*cos(pi x/2) = x (pi^2/4) sin(pi x/2).
double sin_convex_limit() {
  static const double limit = [] {
    double lo = 0.5, hi = 0.9;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double v = M_PI * std::cos(kHalfPi * mid) -
                       mid * kHalfPi * kHalfPi * std::sin(kHalfPi * mid);
      (v > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return limit;
}

}  // namespace

Regularizer Regularizer::shannon() { return {RegKind::shannon, 0, 0}; }

Regularizer Regularizer::tsallis(double q, double k) {
  if (!(q > 1.0)) throw std::invalid_argument("tsallis regularizer requires q > 1");
  if (!(k > 0.0)) throw std::invalid_argument("tsallis regularizer requires k > 0");
  return {RegKind::tsallis, q, k};
}

Regularizer Regularizer::exp() { return {RegKind::exp_kernel, 0, 0}; }
Regularizer Regularizer::cos() { return {RegKind::cos_kernel, 0, 0}; }
Regularizer Regularizer::sin() { return {RegKind::sin_kernel, 0, 0}; }

const char* Regularizer::name() const {
  switch (kind_) {
    case RegKind::shannon: return "shannon";
    case RegKind::tsallis: return "tsallis";
    case RegKind::exp_kernel: return "exp";
    case RegKind::cos_kernel: return "cos";
    case RegKind::sin_kernel: return "sin";
  }
  return "?";
}

Regularizer Regularizer::parse(const std::string& spec) {
  if (spec == "shannon") return shannon();
  if (spec == "exp") return exp();
  if (spec == "cos") return cos();
  if (spec == "sin") return sin();
  if (spec.rfind("tsallis", 0) == 0) {
    double q = 2.0, k = 1.0;
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
      std::string rest = spec.substr(colon + 1);
      std::istringstream is(rest);
      std::string tok;
      while (std::getline(is, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("bad tsallis parameter: " + tok);
        const std::string key = tok.substr(0, eq);
        const double val = std::stod(tok.substr(eq + 1));
        if (key == "q")
          q = val;
        else if (key == "k")
          k = val;
        else
          throw std::invalid_argument("unknown tsallis parameter: " + key);
      }
    }
    return tsallis(q, k);
  }
  throw std::invalid_argument("unknown regularizer spec: " + spec);
}

std::string Regularizer::to_string() const {
  if (kind_ != RegKind::tsallis) return name();
  std::ostringstream os;
  os << "tsallis:q=" << q_ << ",k=" << k_;
  return os.str();
}

double Regularizer::f(double x) const {
  switch (kind_) {
    case RegKind::shannon:
      return x * std::log(x);
    case RegKind::tsallis:
      return k_ * std::pow(x, q_) / (q_ - 1.0);
    case RegKind::exp_kernel:
      return x * std::exp(x) - M_E * x;
    case RegKind::cos_kernel:
      return -x * std::cos(kHalfPi * x);
    case RegKind::sin_kernel:
      return x * std::sin(kHalfPi * x) - x;
  }
  return 0.0;
}

double Regularizer::df(double x) const {
  switch (kind_) {
    case RegKind::shannon:
      return std::log(x) + 1.0;
    case RegKind::tsallis:
      return k_ * q_ * std::pow(x, q_ - 1.0) / (q_ - 1.0);
    case RegKind::exp_kernel:
      return (1.0 + x) * std::exp(x) - M_E;
    case RegKind::cos_kernel:
      return -std::cos(kHalfPi * x) + x * kHalfPi * std::sin(kHalfPi * x);
    case RegKind::sin_kernel:
      return std::sin(kHalfPi * x) + x * kHalfPi * std::cos(kHalfPi * x) - 1.0;
  }
  return 0.0;
}

double Regularizer::d2f(double x) const {
  switch (kind_) {
    case RegKind::shannon:
      return 1.0 / x;
    case RegKind::tsallis:
      return k_ * q_ * std::pow(x, q_ - 2.0);
    case RegKind::exp_kernel:
      return (2.0 + x) * std::exp(x);
    case RegKind::cos_kernel:
      return M_PI * std::sin(kHalfPi * x) + x * kHalfPi * kHalfPi * std::cos(kHalfPi * x);
    case RegKind::sin_kernel:
      return M_PI * std::cos(kHalfPi * x) - x * kHalfPi * kHalfPi * std::sin(kHalfPi * x);
  }
  return 0.0;
}

double Regularizer::offset() const {
  return kind_ == RegKind::tsallis ? -k_ / (q_ - 1.0) : 0.0;
}

double Regularizer::convex_upper_limit() const {
  return kind_ == RegKind::sin_kernel ? sin_convex_limit() : 1.0;
}

double Regularizer::df_inverse(double y, double lo, double hi) const {
  switch (kind_) {
    case RegKind::shannon: {
      // df(x) = ln x + 1; exponent capped since the result clamps to hi < 1
      const double x = std::exp(std::min(y - 1.0, 0.5));
      return std::min(std::max(x, lo), hi);
    }
    case RegKind::tsallis: {
      const double t = y * (q_ - 1.0) / (k_ * q_);
      const double x = t <= 0.0 ? 0.0 : std::pow(std::min(t, 4.0), 1.0 / (q_ - 1.0));
      return std::min(std::max(x, lo), hi);
    }
    default:
      break;
  }
  if (y <= df(lo)) return lo;
  if (y >= df(hi)) return hi;
  // Safeguarded Newton on the strictly increasing df.
  double a = lo, b = hi;
  double x = 0.5 * (a + b);
  for (int i = 0; i < 100; ++i) {
    const double g = df(x) - y;
    if (std::abs(g) < 1e-15 * std::max(1.0, std::abs(y))) return x;
    (g > 0.0 ? b : a) = x;
    const double d2 = d2f(x);
    double next = d2 > 0.0 ? x - g / d2 : x;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) < 1e-16) return next;
    x = next;
  }
  return x;
}

}  // namespace mdirl
