#include "exploss/transform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exploss {

void TransformParams::validate() const {
  if (!(e >= 0.0 && e <= 1.0)) {
    throw std::invalid_argument("TransformParams: e must lie in [0, 1], got " + std::to_string(e));
  }
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("TransformParams: c must be finite and >= 0, got " + std::to_string(c));
  }
  if (!(grad_cap > 0.0)) {
    throw std::invalid_argument("TransformParams: grad_cap must be > 0, got " + std::to_string(grad_cap));
  }
}

namespace {

void check_finite(double yhat) {
  if (!std::isfinite(yhat)) {
    throw std::domain_error("transform: non-finite score " + std::to_string(yhat));
  }
}

}  // namespace

double sigma(double yhat, const TransformParams& p) {
  check_finite(yhat);
  const double s = yhat < 0.0 ? -1.0 : 1.0;
  const double a = std::fabs(yhat);
  if (p.e == 1.0) {
    return s * a;  // identity, exact on both branches
  }
  double v;
  if (a >= p.c) {
    v = (a == 0.0) ? 0.0 : std::pow(a, p.e);  // pow(0, 0) would give 1
  } else {
    v = std::pow(p.c, p.e - 1.0) * a;
  }
  return s * v;
}

double sigma_deriv(double yhat, const TransformParams& p) {
  check_finite(yhat);
  const double a = std::fabs(yhat);
  if (p.c == 0.0) {
    if (a == 0.0) return 0.0;
    return std::min(p.e * std::pow(a, p.e - 1.0), p.grad_cap);
  }
  if (a > p.c) {
    return p.e * std::pow(a, p.e - 1.0);
  }
  // Inside the linear segment, and by convention at the kink itself.
  return std::pow(p.c, p.e - 1.0);
}

}  // namespace exploss
