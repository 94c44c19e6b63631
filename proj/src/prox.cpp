#include "trppm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "trppm/error.hpp"

namespace trppm {

namespace {

constexpr std::uintmax_t kMaxInnerIterations = 200;
constexpr double kRootTolerance = 1e-12;
constexpr int kNewtonDigits = 50;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Real root of z^3 + lambda (z - x) = 0. The cubic is increasing in z, so the
// root is unique and lies between 0 and x.
double quartic_prox(double lambda, double x) {
  if (x == 0.0) return 0.0;
  const double lo = std::min(0.0, x);
  const double hi = std::max(0.0, x);
  const double guess = sign(x) * std::min(std::abs(x), std::cbrt(lambda * std::abs(x)));
  std::uintmax_t iterations = kMaxInnerIterations;
  const double z = boost::math::tools::newton_raphson_iterate(
      [&](double v) {
        return std::make_pair(v * v * v + lambda * (v - x), 3.0 * v * v + lambda);
      },
      guess, lo, hi, kNewtonDigits, iterations);
  // Residual measured in z-space: |g(z)| / g'(z).
  const double residual = std::abs(z * z * z + lambda * (z - x)) / (3.0 * z * z + lambda);
  if (iterations >= kMaxInnerIterations || residual > kRootTolerance * std::max(1.0, std::abs(x))) {
    throw NumericalFailure(
        fmt::format("quartic prox: Newton did not converge (lambda={}, x={})", lambda, x), residual);
  }
  return z;
}

bool singleton_solution_set(const Problem& p) {
  return std::visit(overloaded{
                        [](const Quadratic& q) { return q.eigen.values[0] > 0.0; },
                        [](const IndicatorBox& b) { return (b.lower.array() == b.upper.array()).all(); },
                        [](const IndicatorBall&) { return false; },
                        [](const auto&) { return true; },
                    },
                    p.data());
}

double subproblem_objective(const Problem& p, const Vector& z, const Vector& x, double lambda) {
  const double f = p.value(z);
  if (lambda == 0.0) return f;
  return f + 0.5 * lambda * (z - x).squaredNorm();
}

// Multiplier recovered from the optimality condition (c + lambda)(x - z) = grad f(z)
// on the sphere ||z - x|| = t. Absent at kinks.
std::optional<double> gradient_multiplier(const Problem& p, const Vector& z, double lambda, double t) {
  const auto g = p.gradient(z);
  if (!g) return std::nullopt;
  return std::max(0.0, g->norm() / t - lambda);
}

// Boundary solve for quadratics: find s = lambda + c >= lambda with
// ||(Q + sI)^{-1} Q x|| = t, by Newton on 1/psi(s) - 1/t.
ProxResult quadratic_boundary(const Quadratic& q, const Vector& x, double lambda, double t) {
  const auto& sigma = q.eigen.values;
  const auto& u = q.eigen.vectors;
  const Vector a = sigma.cwiseProduct(u.transpose() * x);

  auto psi = [&](double s) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      const double r = a[i] / (sigma[i] + s);
      sum += r * r;
    }
    return std::sqrt(sum);
  };
  auto h_and_derivative = [&](double s) {
    double sum = 0.0;
    double cube = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      const double inv = 1.0 / (sigma[i] + s);
      const double r = a[i] * inv;
      sum += r * r;
      cube += r * r * inv;
    }
    const double p = std::sqrt(sum);
    // d/ds (1/psi) = -psi'/psi^2 with psi' = -cube/psi.
    return std::make_pair(1.0 / p - 1.0 / t, cube / (p * p * p));
  };

  const double s_lo = lambda;
  const double s_hi = a.norm() / t;
  double s = s_lo;
  if (s_hi > s_lo) {
    std::uintmax_t iterations = kMaxInnerIterations;
    s = boost::math::tools::newton_raphson_iterate(h_and_derivative, s_lo, s_lo, s_hi, kNewtonDigits,
                                                   iterations);
    if (iterations >= kMaxInnerIterations) {
      throw NumericalFailure("tr_prox: secular equation did not converge", std::abs(psi(s) - t));
    }
  }
  const double residual = std::abs(psi(s) - t);
  if (residual > kRootTolerance * std::max(1.0, x.norm())) {
    throw NumericalFailure(fmt::format("tr_prox: secular equation residual {} too large", residual),
                           residual);
  }

  Vector shift(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    shift[i] = a[i] == 0.0 ? 0.0 : a[i] / (sigma[i] + s);
  }
  ProxResult r;
  r.point = x - u * shift;
  r.active = true;
  r.multiplier = std::max(0.0, s - lambda);
  r.residual = residual;
  return r;
}

// Boundary point when the unconstrained comparator `target` lies outside
// the ball of radius t around x.
ProxResult boundary_step(const Problem& p, const Vector& x, const Vector& target, double lambda,
                         double t) {
  ProxResult r = std::visit(
      overloaded{
          [&](const Quadratic& q) { return quadratic_boundary(q, x, lambda, t); },
          [&](const SharpNorm& s) {
            ProxResult out;
            out.point = x * (1.0 - t / x.norm());
            out.active = true;
            if (out.point.norm() > 0.0) out.multiplier = std::max(0.0, s.alpha / t - lambda);
            return out;
          },
          [&](const IndicatorBox&) {
            ProxResult out;
            out.point = x + (t / (target - x).norm()) * (target - x);
            out.active = true;
            out.unique = false;
            return out;
          },
          [&](const IndicatorBall&) {
            ProxResult out;
            out.point = x + (t / (target - x).norm()) * (target - x);
            out.active = true;
            out.unique = false;
            return out;
          },
          [&](const auto&) {
            // 1-D convex objective on an interval: clamp the unconstrained minimizer.
            ProxResult out;
            out.point = Vector::Constant(1, std::clamp(target[0], x[0] - t, x[0] + t));
            out.active = true;
            out.multiplier = gradient_multiplier(p, out.point, lambda, t);
            return out;
          },
      },
      p.data());
  if (!std::holds_alternative<Quadratic>(p.data())) {
    r.residual = std::abs((r.point - x).norm() - t);
  }
  r.objective = subproblem_objective(p, r.point, x, lambda);
  return r;
}

void validate_subproblem(const Problem& p, const Vector& x, double lambda, double radius) {
  require_dimension(x, p.dimension(), "tr_prox center");
  require_finite(x, "tr_prox center");
  if (!(radius > 0.0)) throw InvalidArgument(fmt::format("tr_prox: radius must be positive, got {}", radius));
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument(fmt::format("tr_prox: lambda must be finite and non-negative, got {}", lambda));
  }
}

ProxResult interior_result(const Problem& p, Vector point, const Vector& x, double lambda) {
  ProxResult r;
  r.point = std::move(point);
  r.active = false;
  r.multiplier = 0.0;
  r.objective = subproblem_objective(p, r.point, x, lambda);
  return r;
}

}  // namespace

Vector prox(const Problem& problem, double lambda, const Vector& x) {
  require_dimension(x, problem.dimension(), "prox");
  require_finite(x, "prox");
  if (!(lambda > 0.0)) {
    throw InvalidArgument(fmt::format("prox: lambda must be positive (use prox_zero for 0), got {}", lambda));
  }
  if (std::isinf(lambda)) return x;
  return std::visit(
      overloaded{
          [&](const Quartic1D&) -> Vector { return Vector::Constant(1, quartic_prox(lambda, x[0])); },
          [&](const ScaledAbs& s) -> Vector {
            return Vector::Constant(1, sign(x[0]) * std::max(std::abs(x[0]) - s.mu / lambda, 0.0));
          },
          [&](const Quadratic& q) -> Vector {
            const auto& sigma = q.eigen.values;
            const Vector y = q.eigen.vectors.transpose() * x;
            const Vector scaled = (lambda / (sigma.array() + lambda)).matrix().cwiseProduct(y);
            return q.eigen.vectors * scaled;
          },
          [&](const IndicatorBox&) -> Vector { return problem.project_to_solutions(x); },
          [&](const IndicatorBall&) -> Vector { return problem.project_to_solutions(x); },
          [&](const SharpNorm& s) -> Vector {
            const double n = x.norm();
            if (n == 0.0) return x;
            return std::max(1.0 - s.alpha / (lambda * n), 0.0) * x;
          },
      },
      problem.data());
}

Vector prox_zero(const Problem& problem, const Vector& x) {
  require_finite(x, "prox_zero");
  return problem.project_to_solutions(x);
}

ProxResult tr_prox(const SubproblemSpec& spec) {
  if (spec.problem == nullptr) throw InvalidArgument("tr_prox: problem is null");
  return tr_prox(*spec.problem, spec.center, spec.lambda, spec.radius);
}

ProxResult tr_prox(const Problem& problem, const Vector& x, double lambda, double radius) {
  validate_subproblem(problem, x, lambda, radius);
  if (lambda == 0.0) return brox(problem, x, radius);

  Vector u = prox(problem, lambda, x);
  if ((u - x).norm() <= radius) return interior_result(problem, std::move(u), x, lambda);
  return boundary_step(problem, x, u, lambda, radius);
}

ProxResult brox(const Problem& problem, const Vector& x, double radius) {
  validate_subproblem(problem, x, 0.0, radius);
  Vector u = problem.project_to_solutions(x);
  const double dist = problem.dist_to_solutions(x);
  if (dist <= radius) {
    ProxResult r = interior_result(problem, std::move(u), x, 0.0);
    // Any minimizer inside the ball solves the problem; the projection is the
    // deterministic pick.
    r.unique = singleton_solution_set(problem);
    return r;
  }
  return boundary_step(problem, x, u, 0.0, radius);
}

}  // namespace trppm
