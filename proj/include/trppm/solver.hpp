#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trppm/linalg.hpp"
#include "trppm/problem.hpp"
#include "trppm/prox.hpp"

namespace trppm {

enum class Regime {
  kPpm,                  // lambda > 0, t = inf
  kBpm,                  // lambda = 0, finite t
  kTrppmFixedT,          // finite t, lambda_k from a rule
  kTrppmFixedLambda,     // lambda > 0, t_k = theta * m_f(epsilon, lambda)
  kTrppmUnconstrained,   // strongly convex f, constant lambda, t may be inf
};

enum class LambdaRule {
  kBisection,  // 0.99 * lambda_star(x_k, t)
  kWeakSharp,  // weak_sharp_lambda(x_k, t)
  kConstant,   // the configured lambda
};

enum class TerminationReason { kNeighborhoodReached, kMaxIters, kFixedPoint };

std::string_view to_string(Regime regime);
std::string_view to_string(LambdaRule rule);
std::string_view to_string(TerminationReason reason);
/// Case-insensitive; accepts the names printed by to_string.
Regime parse_regime(std::string_view text);
LambdaRule parse_lambda_rule(std::string_view text);

struct SolverConfig {
  Regime regime = Regime::kPpm;
  double t = kInf;
  double lambda = 0.0;
  double theta = 1.0;
  double epsilon = 0.0;
  LambdaRule lambda_rule = LambdaRule::kBisection;
  std::uint64_t max_iters = 1000;
  /// Defaults to t (BPM, fixed t), epsilon (fixed lambda), 0 otherwise.
  std::optional<double> stop_dist;

  double bisection_safety = 0.99;
  double bisection_tol = 1e-10;
  /// Used by the fixed-lambda regime when m_f has no closed form.
  std::uint64_t grid_samples = 10000;
  double grid_safety = 0.9;
  std::uint64_t seed = 42;
  /// Minimizer anchoring the m_f region; defaults to the projection of x0.
  std::optional<Vector> anchor;

  /// Throws InvalidArgument describing the first violated requirement.
  void validate(const Problem& problem) const;
  double effective_stop_dist() const;
};

/// State at iterate k plus the step taken from it. The final record of a
/// trace carries no step: step_len = 0, active = false, q_k = 1.
struct IterateRecord {
  std::uint64_t k = 0;
  Vector x;
  double f_gap = 0.0;
  double dist = 0.0;
  double step_len = 0.0;
  bool active = false;
  double lambda_k = 0.0;
  double t_k = kInf;
  /// (1 + step_len / dist(x_{k+1}))^{-1}; 0 when x_{k+1} is a minimizer.
  double q_k = 1.0;
  double envelope = 0.0;
};

struct Trace {
  SolverConfig config;
  std::vector<IterateRecord> records;
  TerminationReason reason = TerminationReason::kMaxIters;
  double d0 = 0.0;
  double gap0 = 0.0;
  double stop_dist = 0.0;
  /// Per-step factor promised by the regime's linear bound, when there is one.
  std::optional<double> contraction_bound;
  /// Fixed-lambda regime only: the m_f value used and whether it is exact.
  std::optional<double> m_f;
  bool m_f_closed_form = false;
};

Vector step_ppm(const Problem& problem, const Vector& x, double lambda);

/// One TRPPM step; lambda = 0 is a broximal step, t = inf a PPM step.
ProxResult step_trppm(const Problem& problem, const Vector& x, double lambda, double t);

/// Runs the configured method from x0 until the iterate enters the stop
/// neighborhood, max_iters steps were taken, or the iterate stops moving
/// (step < 1e-14 or a minimizer is hit).
Trace run(const Problem& problem, const Vector& x0, const SolverConfig& config);

enum class RateQuantity { kFGap, kDist };
enum class RateBasis {
  kLinear,  // log(value) against k
  kLogLog,  // log(value) against log(k)
};

/// Least-squares slope of ys against xs.
double fit_slope(std::span<const double> xs, std::span<const double> ys);

/// Fitted slope over records k_lo..k_hi (inclusive). Rejects windows outside
/// the trace and non-positive values.
double empirical_rate(const Trace& trace, std::uint64_t k_lo, std::uint64_t k_hi,
                      RateQuantity quantity = RateQuantity::kFGap,
                      RateBasis basis = RateBasis::kLinear);

struct EquivalenceResult {
  bool equal = false;
  double discrepancy = 0.0;
  ProxResult broximal;
  ProxResult trust_region;
};

/// Compares brox(x, t) with tr_prox(x, lambda, t). Requires phi(lambda, x) > t
/// and dist(x, X*) > t; equality means a discrepancy of at most 1e-8.
EquivalenceResult check_bpm_equivalence(const Problem& problem, const Vector& x, double lambda,
                                        double t);

}  // namespace trppm
