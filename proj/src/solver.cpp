#include "trppm/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "trppm/displacement.hpp"
#include "trppm/error.hpp"

namespace trppm {

namespace {

constexpr double kStationaryStep = 1e-14;
constexpr double kEquivalenceTolerance = 1e-8;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kPpm: return "ppm";
    case Regime::kBpm: return "bpm";
    case Regime::kTrppmFixedT: return "trppm_fixed_t";
    case Regime::kTrppmFixedLambda: return "trppm_fixed_lambda";
    case Regime::kTrppmUnconstrained: return "trppm_unconstrained";
  }
  return "unknown";
}

std::string_view to_string(LambdaRule rule) {
  switch (rule) {
    case LambdaRule::kBisection: return "bisection";
    case LambdaRule::kWeakSharp: return "weak_sharp";
    case LambdaRule::kConstant: return "constant";
  }
  return "unknown";
}

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kNeighborhoodReached: return "neighborhood_reached";
    case TerminationReason::kMaxIters: return "max_iters";
    case TerminationReason::kFixedPoint: return "fixed_point";
  }
  return "unknown";
}

Regime parse_regime(std::string_view text) {
  const std::string s = lower(text);
  for (auto r : {Regime::kPpm, Regime::kBpm, Regime::kTrppmFixedT, Regime::kTrppmFixedLambda,
                 Regime::kTrppmUnconstrained}) {
    if (s == to_string(r)) return r;
  }
  throw InvalidArgument(fmt::format("unknown regime '{}'", text));
}

LambdaRule parse_lambda_rule(std::string_view text) {
  const std::string s = lower(text);
  for (auto r : {LambdaRule::kBisection, LambdaRule::kWeakSharp, LambdaRule::kConstant}) {
    if (s == to_string(r)) return r;
  }
  throw InvalidArgument(fmt::format("unknown lambda rule '{}'", text));
}

void SolverConfig::validate(const Problem& problem) const {
  auto fail = [](std::string_view key, std::string_view why) {
    throw InvalidArgument(fmt::format("solver.{}: {}", key, why));
  };
  if (max_iters == 0) fail("max_iters", "must be positive");
  if (std::isnan(t) || t <= 0.0) fail("t", "must be positive (or inf)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda", "must be finite and non-negative");
  if (stop_dist && !(*stop_dist >= 0.0)) fail("stop_dist", "must be non-negative");

  switch (regime) {
    case Regime::kPpm:
      if (!(lambda > 0.0)) fail("lambda", "ppm requires lambda > 0");
      if (std::isfinite(t)) fail("t", "ppm requires t = inf");
      break;
    case Regime::kBpm:
      if (lambda != 0.0) fail("lambda", "bpm requires lambda = 0");
      if (!std::isfinite(t)) fail("t", "bpm requires a finite radius");
      break;
    case Regime::kTrppmFixedT:
      if (!std::isfinite(t)) fail("t", "trppm_fixed_t requires a finite radius");
      if (lambda_rule == LambdaRule::kWeakSharp && !problem.weak_sharp()) {
        fail("lambda_rule", "weak_sharp rule needs a problem with weak sharp minima");
      }
      if (!(bisection_safety > 0.0 && bisection_safety <= 1.0)) {
        fail("bisection_safety", "must lie in (0, 1]");
      }
      break;
    case Regime::kTrppmFixedLambda:
      if (!(lambda > 0.0)) fail("lambda", "trppm_fixed_lambda requires lambda > 0");
      if (!(theta > 0.0 && theta <= 1.0)) fail("theta", "must lie in (0, 1]");
      if (!positive_finite(epsilon)) fail("epsilon", "must be positive");
      if (!(grid_safety > 0.0 && grid_safety <= 1.0)) fail("grid_safety", "must lie in (0, 1]");
      break;
    case Regime::kTrppmUnconstrained:
      if (!(lambda > 0.0)) fail("lambda", "trppm_unconstrained requires lambda > 0");
      if (!problem.strong_convexity()) {
        fail("regime", "trppm_unconstrained needs a strongly convex problem");
      }
      break;
  }
  if (anchor) {
    require_dimension(*anchor, problem.dimension(), "solver.anchor");
    if (!(std::abs(problem.gap(*anchor)) <= 1e-10)) fail("anchor", "is not a minimizer");
  }
}

double SolverConfig::effective_stop_dist() const {
  if (stop_dist) return *stop_dist;
  switch (regime) {
    case Regime::kBpm:
    case Regime::kTrppmFixedT: return t;
    case Regime::kTrppmFixedLambda: return epsilon;
    default: return 0.0;
  }
}

Vector step_ppm(const Problem& problem, const Vector& x, double lambda) {
  return prox(problem, lambda, x);
}

ProxResult step_trppm(const Problem& problem, const Vector& x, double lambda, double t) {
  return tr_prox(problem, x, lambda, t);
}

Trace run(const Problem& problem, const Vector& x0, const SolverConfig& config) {
  config.validate(problem);
  require_dimension(x0, problem.dimension(), "run x0");
  require_finite(x0, "run x0");

  Trace trace;
  trace.config = config;
  trace.d0 = problem.dist_to_solutions(x0);
  trace.gap0 = problem.gap(x0);
  trace.stop_dist = config.effective_stop_dist();
  if (!std::isfinite(trace.gap0)) throw InvalidArgument("run: x0 must lie in dom f");

  const double d0 = trace.d0;
  const double gap0 = trace.gap0;

  // Constant trust-region radius of the fixed-lambda regime.
  double fixed_t = config.t;
  if (config.regime == Regime::kTrppmFixedLambda) {
    if (has_m_f_closed_form(problem)) {
      trace.m_f = m_f_closed_form(problem, config.epsilon, config.lambda);
      trace.m_f_closed_form = true;
      fixed_t = config.theta * *trace.m_f;
    } else {
      MfQuery query{&problem, x0, config.epsilon, config.lambda,
                    config.anchor.value_or(problem.project_to_solutions(x0))};
      MfGridOptions options;
      options.samples = config.grid_samples;
      options.seed = config.seed;
      trace.m_f = m_f_grid(query, options);
      fixed_t = config.grid_safety * config.theta * *trace.m_f;
    }
  }

  if (d0 > 0.0) {
    switch (config.regime) {
      case Regime::kBpm:
      case Regime::kTrppmFixedT: trace.contraction_bound = 1.0 / (1.0 + config.t / d0); break;
      case Regime::kTrppmFixedLambda: trace.contraction_bound = 1.0 / (1.0 + fixed_t / d0); break;
      case Regime::kTrppmUnconstrained: {
        const double mu = *problem.strong_convexity();
        trace.contraction_bound =
            1.0 / std::min(1.0 + config.t / d0, 1.0 + mu / config.lambda);
        break;
      }
      case Regime::kPpm: break;
    }
  }

  auto envelope = [&](std::uint64_t k) {
    if (k == 0 || gap0 == 0.0) return gap0;
    if (config.regime == Regime::kPpm) {
      return std::min(gap0, d0 * d0 * config.lambda / (2.0 * static_cast<double>(k)));
    }
    return gap0 * std::pow(*trace.contraction_bound, static_cast<double>(k));
  };

  const double stop = trace.stop_dist;
  Vector x = x0;
  for (std::uint64_t k = 0;; ++k) {
    IterateRecord rec;
    rec.k = k;
    rec.x = x;
    rec.f_gap = problem.gap(x);
    rec.dist = problem.dist_to_solutions(x);
    rec.envelope = envelope(k);
    rec.lambda_k = config.lambda;
    rec.t_k = config.regime == Regime::kTrppmFixedLambda ? fixed_t : config.t;

    if (rec.dist == 0.0) {
      trace.reason = TerminationReason::kFixedPoint;
    } else if (rec.dist <= stop) {
      trace.reason = TerminationReason::kNeighborhoodReached;
    } else if (k == config.max_iters) {
      trace.reason = TerminationReason::kMaxIters;
    } else if (config.regime == Regime::kTrppmFixedT && rec.dist <= config.t) {
      // The lambda rules need dist > t.
      trace.reason = TerminationReason::kNeighborhoodReached;
    } else {
      Vector next;
      switch (config.regime) {
        case Regime::kPpm:
          next = step_ppm(problem, x, config.lambda);
          rec.active = false;
          break;
        case Regime::kTrppmFixedT: {
          switch (config.lambda_rule) {
            case LambdaRule::kBisection:
              rec.lambda_k =
                  config.bisection_safety * lambda_star(problem, x, config.t, config.bisection_tol);
              break;
            case LambdaRule::kWeakSharp: rec.lambda_k = weak_sharp_lambda(problem, x, config.t); break;
            case LambdaRule::kConstant: break;
          }
          auto r = step_trppm(problem, x, rec.lambda_k, config.t);
          next = std::move(r.point);
          rec.active = r.active;
          break;
        }
        case Regime::kBpm:
        case Regime::kTrppmFixedLambda:
        case Regime::kTrppmUnconstrained: {
          auto r = step_trppm(problem, x, rec.lambda_k, rec.t_k);
          next = std::move(r.point);
          rec.active = r.active;
          break;
        }
      }
      const double step_len = (x - next).norm();
      if (step_len < kStationaryStep) {
        trace.reason = TerminationReason::kFixedPoint;
      } else {
        rec.step_len = step_len;
        const double next_dist = problem.dist_to_solutions(next);
        rec.q_k = next_dist == 0.0 ? 0.0 : 1.0 / (1.0 + step_len / next_dist);
        trace.records.push_back(std::move(rec));
        x = std::move(next);
        continue;
      }
    }
    // Terminal record: no step taken from here.
    rec.step_len = 0.0;
    rec.active = false;
    rec.q_k = 1.0;
    trace.records.push_back(std::move(rec));
    break;
  }
  return trace;
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw InvalidArgument("fit_slope: need at least two paired points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_slope: abscissae are all equal");
  return sxy / sxx;
}

double empirical_rate(const Trace& trace, std::uint64_t k_lo, std::uint64_t k_hi,
                      RateQuantity quantity, RateBasis basis) {
  if (k_lo >= k_hi || k_hi >= trace.records.size()) {
    throw InvalidArgument(fmt::format("empirical_rate: window [{}, {}] outside trace of {} records",
                                      k_lo, k_hi, trace.records.size()));
  }
  if (basis == RateBasis::kLogLog && k_lo == 0) {
    throw InvalidArgument("empirical_rate: log-log fit needs k_lo >= 1");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(k_hi - k_lo + 1);
  ys.reserve(k_hi - k_lo + 1);
  for (std::uint64_t k = k_lo; k <= k_hi; ++k) {
    const auto& rec = trace.records[k];
    const double v = quantity == RateQuantity::kFGap ? rec.f_gap : rec.dist;
    if (!(v > 0.0)) {
      throw InvalidArgument(fmt::format("empirical_rate: non-positive value at k={}", k));
    }
    const double kk = static_cast<double>(rec.k);
    xs.push_back(basis == RateBasis::kLogLog ? std::log(kk) : kk);
    ys.push_back(std::log(v));
  }
  return fit_slope(xs, ys);
}

EquivalenceResult check_bpm_equivalence(const Problem& problem, const Vector& x, double lambda,
                                        double t) {
  if (!(lambda > 0.0)) throw InvalidArgument("check_bpm_equivalence: lambda must be positive");
  // phi <= dist, so the minimizer test is the informative one to run first.
  const double dist = problem.dist_to_solutions(x);
  const double displacement = phi(problem, x, lambda);
  if (!(dist > t)) {
    throw InvalidArgument(fmt::format(
        "check_bpm_equivalence: a minimizer lies inside the ball (dist={} <= t={})", dist, t));
  }
  if (!(displacement > t)) {
    throw InvalidArgument(fmt::format(
        "check_bpm_equivalence: prox point lies inside the ball (phi={} <= t={})", displacement, t));
  }
  EquivalenceResult out;
  out.broximal = brox(problem, x, t);
  out.trust_region = tr_prox(problem, x, lambda, t);
  out.discrepancy = (out.broximal.point - out.trust_region.point).norm();
  out.equal = out.discrepancy <= kEquivalenceTolerance;
  return out;
}

}  // namespace trppm
