#include "trppm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "trppm/error.hpp"

namespace trppm {

void require_dimension(const Vector& x, Eigen::Index dim, std::string_view what) {
  if (x.size() != dim) {
    throw DimensionError(fmt::format("{}: expected dimension {}, got {}", what, dim, x.size()));
  }
}

void require_finite(const Vector& x, std::string_view what) {
  if (!x.allFinite()) {
    throw InvalidArgument(fmt::format("{}: coordinates must be finite", what));
  }
}

double SymmetricEigen::smallest_positive(double threshold) const {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > threshold) return values[i];
  }
  return 0.0;
}

namespace {

double off_diagonal_norm2(const Matrix& a) {
  double off = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) off += a(i, j) * a(i, j);
    }
  }
  return off;
}

// Applies the rotation J(p, q, c, s) as A <- J^T A J and V <- V J.
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q, double c, double s) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymmetricEigen eigendecompose(const Matrix& q, const EigenOptions& options) {
  if (q.rows() != q.cols() || q.rows() == 0) {
    throw InvalidArgument(fmt::format("eigendecompose: matrix must be square and non-empty, got {}x{}",
                                      q.rows(), q.cols()));
  }
  if (q.rows() > options.max_dimension) {
    throw InvalidArgument(fmt::format("eigendecompose: dimension {} exceeds cap {}", q.rows(),
                                      options.max_dimension));
  }
  if (!q.allFinite()) throw InvalidArgument("eigendecompose: matrix entries must be finite");

  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > options.symmetry_tolerance * scale) {
    throw InvalidArgument("eigendecompose: matrix is not symmetric");
  }

  const Eigen::Index n = q.rows();
  Matrix a = 0.5 * (q + q.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double target = std::pow(1e-16 * std::max(a.norm(), 1e-300), 2);

  bool converged = false;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= target) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (apr == 0.0) continue;
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        rotate(a, v, p, r, c, t * c);
        a(p, r) = 0.0;
        a(r, p) = 0.0;
      }
    }
  }
  if (!converged && off_diagonal_norm2(a) > target) {
    throw NumericalFailure("eigendecompose: Jacobi sweeps did not converge",
                           std::sqrt(off_diagonal_norm2(a)));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  SymmetricEigen result;
  result.values.resize(n);
  result.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    result.values[k] = a(src, src);
    result.vectors.col(k) = v.col(src);
  }
  return result;
}

}  // namespace trppm
