#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "trppm/linalg.hpp"

namespace trppm {

// Catalog problem classes. Each carries the constructor parameters plus any
// data precomputed at construction.

/// f(x) = x^4 / 4 on the real line.
struct Quartic1D {};

/// f(x) = mu |x| on the real line.
struct ScaledAbs {
  double mu = 1.0;
};

/// f(x) = 1/2 x^T Q x with Q symmetric positive semidefinite.
struct Quadratic {
  Matrix q;
  SymmetricEigen eigen;  // eigenvalues in [-1e-10, 0] clamped to 0
};

/// Indicator of the box [lower, upper].
struct IndicatorBox {
  Vector lower;
  Vector upper;
};

/// Indicator of the closed ball of `radius` around `center`.
struct IndicatorBall {
  Vector center;
  double radius = 1.0;
};

/// f(x) = alpha ||x||.
struct SharpNorm {
  double alpha = 1.0;
  Eigen::Index dimension = 1;
};

using ProblemData =
    std::variant<Quartic1D, ScaledAbs, Quadratic, IndicatorBox, IndicatorBall, SharpNorm>;

/// Growth condition f(x) - f_inf >= alpha * dist(x, X*)^order.
struct WeakSharp {
  double alpha;
  double order;
};

/// Immutable objective bundle with exact ground truth.
///
/// The value oracle returns +inf outside dom f. `project_to_solutions` is
/// the Euclidean projection onto the minimizer set. Closed-form proximal
/// maps for every catalog class live in prox.hpp.
class Problem {
 public:
  explicit Problem(ProblemData data);

  const ProblemData& data() const { return data_; }
  const std::string& name() const { return name_; }
  Eigen::Index dimension() const { return dimension_; }
  double f_inf() const { return 0.0; }
  const std::optional<WeakSharp>& weak_sharp() const { return weak_sharp_; }
  const std::optional<double>& strong_convexity() const { return strong_convexity_; }
  bool has_exact_prox() const { return true; }
  bool is_indicator() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&data_);
  }

  /// f(x); +inf outside the domain. Checks dimension.
  double value(const Vector& x) const;

  /// f(x) - f_inf.
  double gap(const Vector& x) const { return value(x) - f_inf(); }

  /// Gradient at x when f is differentiable there, otherwise empty.
  std::optional<Vector> gradient(const Vector& x) const;

  Vector project_to_solutions(const Vector& x) const;

  double dist_to_solutions(const Vector& x) const;

 private:
  ProblemData data_;
  std::string name_;
  Eigen::Index dimension_ = 1;
  std::optional<WeakSharp> weak_sharp_;
  std::optional<double> strong_convexity_;
};

Problem make_quartic1d();
Problem make_scaled_abs(double mu);
/// Rejects non-symmetric Q and any eigenvalue below -1e-10.
Problem make_quadratic(const Matrix& q);
/// Rejects empty boxes (lower > upper in any coordinate).
Problem make_indicator_box(const Vector& lower, const Vector& upper);
Problem make_indicator_ball(const Vector& center, double radius);
Problem make_sharp_norm(double alpha, Eigen::Index dimension);

/// Problem addressed by catalog name plus string parameters.
///
/// Names: quartic1d, scaled_abs (mu), quadratic (Q as "a,b;c,d"),
/// indicator_box (lower, upper), indicator_ball (center, radius),
/// sharp_norm (alpha, dim). Vectors are comma-separated lists.
struct CatalogEntry {
  std::string name;
  std::map<std::string, std::string> params;
};

Problem make_problem(const CatalogEntry& entry);

// Distance from x to the minimizer set of p.
inline double dist_to_solutions(const Problem& p, const Vector& x) {
  return p.dist_to_solutions(x);
}

}  // namespace trppm
