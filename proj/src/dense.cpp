#include "defcg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "defcg/errors.hpp"

namespace defcg {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_column(std::size_t j, std::span<const double> v) {
  require(v.size() == rows_, "set_column: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool Matrix::all_finite() const noexcept { return defcg::all_finite(data_); }

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
  require(m_.rows() == m_.cols(), "SpdMatrix: matrix is not square");
  if (!m_.all_finite())
    throw std::invalid_argument("SpdMatrix: non-finite entry");
  const double tol = 1e-12 * m_.max_abs();
  const std::size_t n = m_.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m_(i, j) - m_(j, i)) > tol)
        throw std::invalid_argument("SpdMatrix: not symmetric at (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
}

SpdMatrix symmetrized(Matrix m) {
  require(m.rows() == m.cols(), "symmetrized: matrix is not square");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) m(i, j) = m(j, i);
  return SpdMatrix(std::move(m));
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "add: length mismatch");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "subtract: length mismatch");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vector scaled(double alpha, std::span<const double> a) {
  Vector c(a.begin(), a.end());
  for (double& x : c) x *= alpha;
  return c;
}

Vector matvec(const Matrix& A, std::span<const double> v) {
  require(A.cols() == v.size(), "matvec: dimension mismatch");
  Vector out(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto r = A.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * v[j];
    out[i] = s;
  }
  return out;
}

Vector matvec(const SpdMatrix& A, std::span<const double> v) {
  return matvec(A.matrix(), v);
}

Vector matvec_transposed(const Matrix& A, std::span<const double> v) {
  require(A.rows() == v.size(), "matvec_transposed: dimension mismatch");
  Vector out(A.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto r = A.row(i);
    const double vi = v[i];
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] * vi;
  }
  return out;
}

Matrix gemm(const Matrix& X, const Matrix& Y) {
  require(X.cols() == Y.rows(), "gemm: dimension mismatch");
  Matrix out(X.rows(), Y.cols());
  // i-k-j order: each output entry accumulates over k in increasing order.
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto o = out.row(i);
    for (std::size_t k = 0; k < X.cols(); ++k) {
      const double xik = X(i, k);
      const auto y = Y.row(k);
      for (std::size_t j = 0; j < y.size(); ++j) o[j] += xik * y[j];
    }
  }
  return out;
}

Matrix gemm_tn(const Matrix& X, const Matrix& Y) {
  require(X.rows() == Y.rows(), "gemm_tn: dimension mismatch");
  Matrix out(X.cols(), Y.cols());
  for (std::size_t k = 0; k < X.rows(); ++k) {
    const auto x = X.row(k);
    const auto y = Y.row(k);
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto o = out.row(i);
      const double xi = x[i];
      for (std::size_t j = 0; j < y.size(); ++j) o[j] += xi * y[j];
    }
  }
  return out;
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace defcg
