#pragma once

#include <optional>

#include "trppm/linalg.hpp"
#include "trppm/problem.hpp"

namespace trppm {

/// Solution of a (possibly ball-constrained) proximal subproblem.
struct ProxResult {
  Vector point;
  /// True when the trust-region constraint is tight: ||point - center|| = t.
  bool active = false;
  /// Boundary multiplier c with (c + lambda)(center - point) in df(point).
  /// Zero for inactive results; absent when the point is a kink of f.
  std::optional<double> multiplier;
  /// f(point) + lambda/2 ||point - center||^2.
  double objective = 0.0;
  /// Residual of the inner solve (root residual or |radius mismatch|).
  double residual = 0.0;
  /// False when several minimizers exist and a deterministic one was picked.
  bool unique = true;
};

/// argmin over ||z - center|| <= radius of f(z) + lambda/2 ||z - center||^2.
/// radius may be +inf; lambda may be 0 (broximal step).
struct SubproblemSpec {
  const Problem* problem = nullptr;
  Vector center;
  double lambda = 0.0;
  double radius = kInf;
};

/// Proximal map argmin_z f(z) + lambda/2 ||z - x||^2, for lambda > 0.
///
/// Closed forms: soft thresholding (scaled_abs), eigenbasis shrinkage
/// lambda/(lambda + sigma_i) (quadratic), Euclidean projection (indicators),
/// block soft thresholding (sharp_norm). The quartic root of
/// z^3 + lambda (z - x) = 0 is found by safeguarded Newton; failure to
/// converge within 200 steps raises NumericalFailure. lambda = +inf returns x.
Vector prox(const Problem& problem, double lambda, const Vector& x);

/// The lambda = 0 convention: projection onto the minimizer set.
Vector prox_zero(const Problem& problem, const Vector& x);

/// Trust-region proximal step.
///
/// Dispatch: the unconstrained minimizer u (prox, or the solution projection
/// when lambda = 0) is returned when ||u - x|| <= radius. Otherwise the
/// boundary problem is solved per problem class: secular equation for
/// quadratics, interval clamp for the 1-D classes, ray step for indicators
/// and sharp_norm.
ProxResult tr_prox(const SubproblemSpec& spec);
ProxResult tr_prox(const Problem& problem, const Vector& x, double lambda, double radius);

/// Minimizer of f over the closed ball of `radius` around x.
ProxResult brox(const Problem& problem, const Vector& x, double radius);

}  // namespace trppm
