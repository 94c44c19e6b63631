#include "trppm/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "trppm/error.hpp"
#include "trppm/prox.hpp"
#include "trppm/sampling.hpp"

namespace trppm {

namespace {

constexpr double kLambdaFloor = 1e-12;
constexpr int kMaxBisections = 200;
constexpr double kMembershipSlack = 1e-12;
constexpr double kAnchorTolerance = 1e-10;

void require_outside(const Problem& p, const Vector& x, double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidArgument(fmt::format("{}: t must be positive and finite, got {}", what, t));
  }
  const double dist = p.dist_to_solutions(x);
  if (!(dist > t)) {
    throw InvalidArgument(
        fmt::format("{}: requires dist(x, X*) > t, got dist={} and t={}", what, dist, t));
  }
}

}  // namespace

double phi(const Problem& problem, const Vector& x, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument(fmt::format("phi: lambda must be non-negative, got {}", lambda));
  if (lambda == 0.0) return problem.dist_to_solutions(x);
  if (std::isinf(lambda)) return 0.0;
  return (x - prox(problem, lambda, x)).norm();
}

double lambda_star_upper_bound(const Problem& problem, const Vector& x, double t) {
  if (!(t > 0.0)) throw InvalidArgument("lambda_star_upper_bound: t must be positive");
  return 2.0 * problem.gap(x) / (t * t);
}

double lambda_star(const Problem& problem, const Vector& x, double t, double tol) {
  require_outside(problem, x, t, "lambda_star");
  if (!(tol > 0.0)) throw InvalidArgument("lambda_star: tol must be positive");
  const double gap = problem.gap(x);
  if (!std::isfinite(gap)) throw InvalidArgument("lambda_star: x must lie in dom f");

  double hi = lambda_star_upper_bound(problem, x, t);
  if (phi(problem, x, hi) >= t) return hi;

  double lo = std::min(kLambdaFloor, hi);
  while (phi(problem, x, lo) < t) {
    lo *= 1e-3;
    if (lo < 1e-300) {
      throw NumericalFailure("lambda_star: no lower bracket with phi >= t", t - phi(problem, x, lo));
    }
  }

  for (int i = 0; i < kMaxBisections; ++i) {
    if (hi <= lo * (1.0 + tol)) break;
    if (std::abs(phi(problem, x, lo) - t) <= tol * t) break;
    const double mid = std::sqrt(lo * hi);
    if (phi(problem, x, mid) >= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double weak_sharp_lambda(const Problem& problem, const Vector& x, double t) {
  const auto& sharp = problem.weak_sharp();
  if (!sharp) {
    throw InvalidArgument(fmt::format("weak_sharp_lambda: problem '{}' has no weak sharp metadata",
                                      problem.name()));
  }
  require_outside(problem, x, t, "weak_sharp_lambda");
  const double alpha = sharp->alpha;
  if (sharp->order == 1.0) {
    return 2.0 * alpha * alpha / (problem.gap(x) + alpha * t);
  }
  const double dist = problem.dist_to_solutions(x);
  return 2.0 * alpha * std::pow(dist - t, sharp->order - 1.0) / (dist + t);
}

bool has_m_f_closed_form(const Problem& problem) {
  if (problem.is_indicator() || problem.as<ScaledAbs>()) return true;
  if (const auto* q = problem.as<Quadratic>()) return q->eigen.smallest_positive() > 0.0;
  return false;
}

double m_f_closed_form(const Problem& problem, double epsilon, double lambda) {
  if (!(epsilon > 0.0)) throw InvalidArgument("m_f_closed_form: epsilon must be positive");
  if (!(lambda >= 0.0)) throw InvalidArgument("m_f_closed_form: lambda must be non-negative");
  if (!has_m_f_closed_form(problem)) {
    throw UnsupportedProblem(
        fmt::format("m_f_closed_form: no closed form for problem '{}'", problem.name()));
  }
  if (std::isinf(lambda)) return 0.0;
  if (problem.is_indicator()) return epsilon;
  if (const auto* s = problem.as<ScaledAbs>()) {
    return lambda == 0.0 ? epsilon : std::min(epsilon, s->mu / lambda);
  }
  const double sigma = problem.as<Quadratic>()->eigen.smallest_positive();
  return sigma / (sigma + lambda) * epsilon;
}

double m_f_grid(const MfQuery& query, const MfGridOptions& options) {
  if (query.problem == nullptr) throw InvalidArgument("m_f_grid: problem is null");
  const Problem& p = *query.problem;
  if (!(query.epsilon > 0.0)) throw InvalidArgument("m_f_grid: epsilon must be positive");
  if (!(query.lambda >= 0.0)) throw InvalidArgument("m_f_grid: lambda must be non-negative");
  if (options.samples < 1000) throw InvalidArgument("m_f_grid: at least 1000 samples required");
  require_dimension(query.x0, p.dimension(), "m_f_grid x0");
  require_dimension(query.anchor, p.dimension(), "m_f_grid anchor");
  if (!(std::abs(p.value(query.anchor) - p.f_inf()) <= kAnchorTolerance)) {
    throw InvalidArgument("m_f_grid: anchor is not a minimizer");
  }

  const HaltonBallSampler sampler(query.anchor, (query.x0 - query.anchor).norm(), options.seed);
  const unsigned workers = std::max(1u, options.workers);
  std::vector<double> shard_min(workers, kInf);
  std::vector<std::exception_ptr> shard_error(workers);

  auto run_shard = [&](unsigned shard) noexcept {
    try {
      const std::uint64_t begin = options.samples * shard / workers;
      const std::uint64_t end = options.samples * (shard + 1) / workers;
      double best = kInf;
      for (std::uint64_t i = begin; i < end; ++i) {
        const Vector x = sampler(i);
        if (p.dist_to_solutions(x) < query.epsilon - kMembershipSlack) continue;
        best = std::min(best, phi(p, x, query.lambda));
      }
      shard_min[shard] = best;
    } catch (...) {
      shard_error[shard] = std::current_exception();
    }
  };

  if (workers == 1) {
    run_shard(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned s = 0; s < workers; ++s) threads.emplace_back(run_shard, s);
  }

  for (const auto& error : shard_error) {
    if (error) std::rethrow_exception(error);
  }
  const double result = *std::min_element(shard_min.begin(), shard_min.end());
  if (std::isinf(result)) {
    throw InfeasibleRegion(fmt::format(
        "m_f_grid: no sample satisfies dist >= {} inside the ball of radius {}", query.epsilon,
        (query.x0 - query.anchor).norm()));
  }
  return result;
}

}  // namespace trppm
