#pragma once

#include <cstdint>

#include "trppm/linalg.hpp"
#include "trppm/problem.hpp"

namespace trppm {

/// Displacement ||x - prox(lambda, x)||; dist(x, X*) at lambda = 0 and 0 at
/// lambda = +inf.
double phi(const Problem& problem, const Vector& x, double lambda);

/// Critical regularization: a conservative lambda with phi(lambda, x) >= t.
///
/// Requires dist(x, X*) > t and x in dom f. Geometric bisection on
/// [1e-12, 2 (f(x) - f_inf) / t^2] keeps the invariant phi(lo, x) >= t and
/// returns lo once hi <= lo (1 + tol) or |phi(lo, x) - t| <= tol t. If
/// phi(hi, x) >= t already, hi is returned.
double lambda_star(const Problem& problem, const Vector& x, double t, double tol = 1e-10);

/// 2 (f(x) - f_inf) / t^2, an upper bound on the critical regularization.
double lambda_star_upper_bound(const Problem& problem, const Vector& x, double t);

/// Admissible lambda from the weak sharp minima constants (alpha, q):
///   q = 1:  2 alpha^2 / (f(x) - f_inf + alpha t)
///   q > 1:  2 alpha (dist - t)^(q - 1) / (dist + t)
/// Requires the problem's weak_sharp metadata and dist(x, X*) > t.
double weak_sharp_lambda(const Problem& problem, const Vector& x, double t);

/// True for the classes with a known m_f: indicators, scaled_abs and
/// quadratics with a positive eigenvalue.
bool has_m_f_closed_form(const Problem& problem);

/// Closed-form uniform displacement bound m_f(epsilon, lambda):
/// epsilon for indicators, min(epsilon, mu / lambda) for scaled_abs and
/// sigma_+ / (sigma_+ + lambda) epsilon for quadratics. Throws
/// UnsupportedProblem for other classes.
double m_f_closed_form(const Problem& problem, double epsilon, double lambda);

struct MfQuery {
  const Problem* problem = nullptr;
  Vector x0;
  double epsilon = 0.0;
  double lambda = 0.0;
  /// Minimizer the sampled ball is centered at; its radius is ||x0 - anchor||.
  Vector anchor;
};

struct MfGridOptions {
  std::uint64_t samples = 10000;
  unsigned workers = 1;
  std::uint64_t seed = 42;
};

// Sample estimate of m_f: the minimum of phi over the low-discrepancy points
// of the ball that satisfy dist >= epsilon - 1e-12. Never below the true
// minimum. Shards are merged by min, so the result does not depend on
// `workers`.
double m_f_grid(const MfQuery& query, const MfGridOptions& options = {});

}  // namespace trppm
