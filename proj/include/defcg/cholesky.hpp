#pragma once

#include <span>

#include "defcg/dense.hpp"

namespace defcg {

/// Relative pivot tolerance: a pivot <= kCholeskyPivotTol * max_i A_ii
/// means the matrix is treated as not positive definite.
inline constexpr double kCholeskyPivotTol = 1e-14;

/// Lower-triangular L with L L^T = A.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;
  explicit CholeskyFactor(Matrix lower) : L_(std::move(lower)) {}

  std::size_t size() const noexcept { return L_.rows(); }
  const Matrix& lower() const noexcept { return L_; }

  /// Solves L y = b.
  Vector forward(std::span<const double> b) const;
  /// Solves L^T x = y.
  Vector backward(std::span<const double> y) const;
  /// log det(A) = 2 sum log L_ii
  double log_det() const;
  /// L L^T, for reconstruction checks.
  Matrix reconstruct() const;

 private:
  Matrix L_;
};

/// Throws NotPositiveDefinite{pivot_index} on a pivot at or below
/// pivot_tol * max diag.
CholeskyFactor cholesky_factor(const SpdMatrix& A,
                               double pivot_tol = kCholeskyPivotTol);

/// Solves L L^T x = b. Throws DimensionMismatch.
Vector cholesky_solve(const CholeskyFactor& L, std::span<const double> b);

/// Column-wise solve L L^T X = B.
Matrix cholesky_solve(const CholeskyFactor& L, const Matrix& B);

}  // namespace defcg
