#include "trppm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "trppm/error.hpp"
#include "trppm/parse.hpp"

namespace trppm {

namespace {

constexpr double kPsdTolerance = 1e-10;
constexpr double kBallMembershipTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Null-space projector of a quadratic: sum of u_i u_i^T over zero eigenvalues.
Vector kernel_projection(const Quadratic& q, const Vector& x) {
  const auto& eig = q.eigen;
  Vector out = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] == 0.0) {
      const auto u = eig.vectors.col(i);
      out += u.dot(x) * u;
    }
  }
  return out;
}

}  // namespace

Problem::Problem(ProblemData data) : data_(std::move(data)) {
  std::visit(overloaded{
                 [&](const Quartic1D&) {
                   name_ = "quartic1d";
                   dimension_ = 1;
                   weak_sharp_ = WeakSharp{0.25, 4.0};
                 },
                 [&](const ScaledAbs& s) {
                   name_ = "scaled_abs";
                   dimension_ = 1;
                   weak_sharp_ = WeakSharp{s.mu, 1.0};
                 },
                 [&](const Quadratic& q) {
                   name_ = "quadratic";
                   dimension_ = q.q.rows();
                   const double sigma_plus = q.eigen.smallest_positive();
                   if (sigma_plus > 0.0) weak_sharp_ = WeakSharp{sigma_plus / 2.0, 2.0};
                   if (q.eigen.values[0] > 0.0) strong_convexity_ = q.eigen.values[0];
                 },
                 [&](const IndicatorBox& b) {
                   name_ = "indicator_box";
                   dimension_ = b.lower.size();
                 },
                 [&](const IndicatorBall& b) {
                   name_ = "indicator_ball";
                   dimension_ = b.center.size();
                 },
                 [&](const SharpNorm& s) {
                   name_ = "sharp_norm";
                   dimension_ = s.dimension;
                   weak_sharp_ = WeakSharp{s.alpha, 1.0};
                 },
             },
             data_);
}

bool Problem::is_indicator() const {
  return std::holds_alternative<IndicatorBox>(data_) || std::holds_alternative<IndicatorBall>(data_);
}

double Problem::value(const Vector& x) const {
  require_dimension(x, dimension_, "Problem::value");
  return std::visit(
      overloaded{
          [&](const Quartic1D&) { return std::pow(x[0], 4) / 4.0; },
          [&](const ScaledAbs& s) { return s.mu * std::abs(x[0]); },
          [&](const Quadratic& q) {
            const Vector y = q.eigen.vectors.transpose() * x;
            return 0.5 * (q.eigen.values.array() * y.array().square()).sum();
          },
          [&](const IndicatorBox& b) {
            const bool inside = (x.array() >= b.lower.array()).all() &&
                                (x.array() <= b.upper.array()).all();
            return inside ? 0.0 : kInf;
          },
          [&](const IndicatorBall& b) {
            const double r = (x - b.center).norm();
            return r <= b.radius + kBallMembershipTolerance * std::max(1.0, b.radius) ? 0.0 : kInf;
          },
          [&](const SharpNorm& s) { return s.alpha * x.norm(); },
      },
      data_);
}

std::optional<Vector> Problem::gradient(const Vector& x) const {
  require_dimension(x, dimension_, "Problem::gradient");
  return std::visit(
      overloaded{
          [&](const Quartic1D&) -> std::optional<Vector> {
            return Vector::Constant(1, std::pow(x[0], 3));
          },
          [&](const ScaledAbs& s) -> std::optional<Vector> {
            if (x[0] == 0.0) return std::nullopt;
            return Vector::Constant(1, std::copysign(s.mu, x[0]));
          },
          [&](const Quadratic& q) -> std::optional<Vector> { return Vector(q.q * x); },
          [&](const IndicatorBox& b) -> std::optional<Vector> {
            if ((x.array() > b.lower.array()).all() && (x.array() < b.upper.array()).all()) {
              return Vector::Zero(x.size());
            }
            return std::nullopt;
          },
          [&](const IndicatorBall& b) -> std::optional<Vector> {
            // Projections land within rounding of the sphere; treat those as boundary.
            if ((x - b.center).norm() < b.radius - 1e-12 * std::max(1.0, b.radius)) {
              return Vector::Zero(x.size());
            }
            return std::nullopt;
          },
          [&](const SharpNorm& s) -> std::optional<Vector> {
            const double n = x.norm();
            if (n == 0.0) return std::nullopt;
            return Vector(s.alpha * x / n);
          },
      },
      data_);
}

Vector Problem::project_to_solutions(const Vector& x) const {
  require_dimension(x, dimension_, "Problem::project_to_solutions");
  return std::visit(overloaded{
                        [&](const Quadratic& q) { return kernel_projection(q, x); },
                        [&](const IndicatorBox& b) -> Vector {
                          return x.cwiseMax(b.lower).cwiseMin(b.upper);
                        },
                        [&](const IndicatorBall& b) -> Vector {
                          const Vector d = x - b.center;
                          const double r = d.norm();
                          if (r <= b.radius) return x;
                          return b.center + (b.radius / r) * d;
                        },
                        [&](const auto&) -> Vector { return Vector::Zero(x.size()); },
                    },
                    data_);
}

double Problem::dist_to_solutions(const Vector& x) const {
  require_finite(x, "dist_to_solutions");
  if (const auto* ball = as<IndicatorBall>()) {
    require_dimension(x, dimension_, "dist_to_solutions");
    return std::max(0.0, (x - ball->center).norm() - ball->radius);
  }
  return (x - project_to_solutions(x)).norm();
}

Problem make_quartic1d() { return Problem(Quartic1D{}); }

Problem make_scaled_abs(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("scaled_abs: mu must be positive");
  return Problem(ScaledAbs{mu});
}

Problem make_quadratic(const Matrix& q) {
  Quadratic data;
  data.q = q;
  data.eigen = eigendecompose(q);
  for (Eigen::Index i = 0; i < data.eigen.values.size(); ++i) {
    double& s = data.eigen.values[i];
    if (s < -kPsdTolerance) {
      throw InvalidArgument(fmt::format("quadratic: Q is not positive semidefinite (eigenvalue {})", s));
    }
    if (s <= SymmetricEigen::kPositiveThreshold) s = 0.0;
  }
  return Problem(std::move(data));
}

Problem make_indicator_box(const Vector& lower, const Vector& upper) {
  if (lower.size() == 0) throw InvalidArgument("indicator_box: bounds must be non-empty");
  require_dimension(upper, lower.size(), "indicator_box upper");
  require_finite(lower, "indicator_box lower");
  require_finite(upper, "indicator_box upper");
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("indicator_box: box is empty");
  return Problem(IndicatorBox{lower, upper});
}

Problem make_indicator_ball(const Vector& center, double radius) {
  if (center.size() == 0) throw InvalidArgument("indicator_ball: center must be non-empty");
  require_finite(center, "indicator_ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("indicator_ball: radius must be positive");
  }
  return Problem(IndicatorBall{center, radius});
}

Problem make_sharp_norm(double alpha, Eigen::Index dimension) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("sharp_norm: alpha must be positive");
  if (dimension < 1) throw InvalidArgument("sharp_norm: dim must be at least 1");
  return Problem(SharpNorm{alpha, dimension});
}

Problem make_problem(const CatalogEntry& entry) {
  const auto& params = entry.params;
  auto check_keys = [&](std::set<std::string> allowed) {
    for (const auto& [key, _] : params) {
      if (!allowed.count(key)) {
        throw InvalidArgument(fmt::format("problem '{}': unknown parameter '{}'", entry.name, key));
      }
    }
  };
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  auto require = [&](const std::string& key) {
    auto v = get(key);
    if (!v) throw InvalidArgument(fmt::format("problem '{}': missing parameter '{}'", entry.name, key));
    return *v;
  };

  if (entry.name == "quartic1d") {
    check_keys({});
    return make_quartic1d();
  }
  if (entry.name == "scaled_abs") {
    check_keys({"mu"});
    return make_scaled_abs(get("mu") ? parse::real(*get("mu"), "problem.mu") : 1.0);
  }
  if (entry.name == "quadratic") {
    check_keys({"Q"});
    return make_quadratic(parse::matrix(require("Q"), "problem.Q"));
  }
  if (entry.name == "indicator_box") {
    check_keys({"lower", "upper"});
    return make_indicator_box(parse::vector(require("lower"), "problem.lower"),
                              parse::vector(require("upper"), "problem.upper"));
  }
  if (entry.name == "indicator_ball") {
    check_keys({"center", "radius"});
    return make_indicator_ball(parse::vector(require("center"), "problem.center"),
                               get("radius") ? parse::real(*get("radius"), "problem.radius") : 1.0);
  }
  if (entry.name == "sharp_norm") {
    check_keys({"alpha", "dim"});
    const double alpha = get("alpha") ? parse::real(*get("alpha"), "problem.alpha") : 1.0;
    const auto dim = get("dim") ? parse::integer(*get("dim"), "problem.dim") : 1;
    return make_sharp_norm(alpha, static_cast<Eigen::Index>(dim));
  }
  throw InvalidArgument(fmt::format("unknown problem '{}'", entry.name));
}

}  // namespace trppm
