#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace defcg {

using Vector = std::vector<double>;

/// Row-major dense matrix with finite entries.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> v);

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transpose() const;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square symmetric matrix carrying the SPD contract.
///
/// Symmetry is checked on construction (|A_ij - A_ji| <= 1e-12 max|A|).
/// Positive definiteness is only verified when something factors it.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Matrix m);
  SpdMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SpdMatrix(Matrix(rows)) {}

  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return m_(i, j);
  }
  const Matrix& matrix() const noexcept { return m_; }
  double max_abs() const noexcept { return m_.max_abs(); }

 private:
  Matrix m_;
};

/// Copies the lower triangle into the upper one, then wraps.
SpdMatrix symmetrized(Matrix m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(double alpha, std::span<const double> a);

Vector matvec(const Matrix& A, std::span<const double> v);
Vector matvec(const SpdMatrix& A, std::span<const double> v);
/// A^T v without forming the transpose.
Vector matvec_transposed(const Matrix& A, std::span<const double> v);
Matrix gemm(const Matrix& X, const Matrix& Y);
/// X^T Y
Matrix gemm_tn(const Matrix& X, const Matrix& Y);

bool all_finite(std::span<const double> v) noexcept;

}  // namespace defcg
