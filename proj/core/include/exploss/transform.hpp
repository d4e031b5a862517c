#pragma once

namespace exploss {

// Parameters of the exponentiated squashing map applied to raw scores:
//
//   sigma(y) = sgn(y) * |y|^e   for |y| >= c
//            = c^(e-1) * y      for |y| <  c
//
// The two branches meet continuously at |y| = c. e = 1 gives the identity
// on both branches, so the untransformed loss is the same code path.
struct TransformParams {
  double e = 1.0;         // exponent, in [0, 1]
  double c = 0.005;       // crossover threshold, >= 0
  double grad_cap = 1e6;  // derivative magnitude ceiling, used when c == 0

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;

  bool is_identity() const { return e == 1.0; }
};

// Value of the squashing map. Odd by construction: the magnitude is
// transformed and the sign reattached, so sigma(-y) == -sigma(y) exactly.
// Non-finite input throws std::domain_error.
double sigma(double yhat, const TransformParams& p);

// Derivative of sigma with respect to yhat.
//
// For c > 0 the kink at |y| = c takes the linear-branch slope c^(e-1),
// the larger of the two one-sided slopes and the one consistent with the
// c -> 0 limit along the linear segment. For c == 0 the power-branch slope
// e*|y|^(e-1) diverges at the origin, so magnitudes are capped at grad_cap
// and the derivative at y == 0 is defined as 0.
double sigma_deriv(double yhat, const TransformParams& p);

}  // namespace exploss
