#pragma once

#include <Eigen/Core>

#include <limits>
#include <string_view>

namespace trppm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Throws DimensionError unless x has the expected dimension.
void require_dimension(const Vector& x, Eigen::Index dim, std::string_view what);

// Throws InvalidArgument if any coordinate is NaN or infinite.
void require_finite(const Vector& x, std::string_view what);

/// Spectral decomposition Q = U diag(values) U^T of a symmetric matrix.
///
/// Eigenvalues are sorted ascending and the columns of `vectors` are the
/// matching orthonormal eigenvectors.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;

  /// Smallest eigenvalue strictly above `threshold`, or 0 when none is.
  double smallest_positive(double threshold = kPositiveThreshold) const;

  static constexpr double kPositiveThreshold = 1e-12;
};

struct EigenOptions {
  Eigen::Index max_dimension = 64;
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-12;
};

/// Cyclic Jacobi eigendecomposition for small dense symmetric matrices.
///
/// Rejects non-square and non-symmetric input (relative asymmetry above
/// `symmetry_tolerance`) and matrices larger than `max_dimension`.
SymmetricEigen eigendecompose(const Matrix& q, const EigenOptions& options = {});

}  // namespace trppm
