#include "defcg/cholesky.hpp"

#include <algorithm>
#include <cmath>

#include "defcg/errors.hpp"

namespace defcg {

CholeskyFactor cholesky_factor(const SpdMatrix& A, double pivot_tol) {
  const std::size_t n = A.size();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, A(i, i));
  const double threshold = pivot_tol * max_diag;

  // Row-oriented Cholesky-Crout: row i of L only needs rows 0..i, so each
  // inner product runs over contiguous memory.
  Matrix L(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = L.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const auto lj = L.row(j);
      double s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / lj[j];
    }
    double d = A(i, i);
    for (std::size_t k = 0; k < i; ++k) d -= li[k] * li[k];
    if (!(d > threshold) || max_diag <= 0.0) throw NotPositiveDefinite(i);
    li[i] = std::sqrt(d);
  }
  return CholeskyFactor(std::move(L));
}

Vector CholeskyFactor::forward(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw DimensionMismatch("cholesky forward: size mismatch");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = L_.row(i);
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * y[k];
    y[i] = s / li[i];
  }
  return y;
}

Vector CholeskyFactor::backward(std::span<const double> y) const {
  const std::size_t n = size();
  if (y.size() != n) throw DimensionMismatch("cholesky backward: size mismatch");
  Vector x(y.begin(), y.end());
  for (std::size_t ii = n; ii-- > 0;) {
    x[ii] /= L_(ii, ii);
    const double xi = x[ii];
    const auto li = L_.row(ii);
    for (std::size_t k = 0; k < ii; ++k) x[k] -= li[k] * xi;
  }
  return x;
}

double CholeskyFactor::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += std::log(L_(i, i));
  return 2.0 * s;
}

Matrix CholeskyFactor::reconstruct() const {
  return gemm(L_, L_.transpose());
}

Vector cholesky_solve(const CholeskyFactor& L, std::span<const double> b) {
  if (b.size() != L.size())
    throw DimensionMismatch("cholesky_solve: dimension mismatch");
  return L.backward(L.forward(b));
}

Matrix cholesky_solve(const CholeskyFactor& L, const Matrix& B) {
  if (B.rows() != L.size())
    throw DimensionMismatch("cholesky_solve: dimension mismatch");
  Matrix X(B.rows(), B.cols());
  for (std::size_t j = 0; j < B.cols(); ++j)
    X.set_column(j, cholesky_solve(L, B.column(j)));
  return X;
}

}  // namespace defcg
