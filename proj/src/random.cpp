#include "defcg/random.hpp"

#include <cmath>
#include <numbers>

namespace defcg {

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector random_vector(std::size_t n, Rng& rng) {
  Vector v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.normal();
  return m;
}

Matrix random_orthogonal(std::size_t n, Rng& rng) {
  Matrix q = random_matrix(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    Vector v = q.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const Vector qi = q.column(i);
        axpy(-dot(qi, v), qi, v);
      }
    }
    const double nrm = norm2(v);
    for (double& x : v) x /= nrm;
    q.set_column(j, v);
  }
  return q;
}

SpdMatrix spd_with_spectrum(std::span<const double> eigenvalues, Rng& rng,
                            Matrix* Q_out) {
  const std::size_t n = eigenvalues.size();
  Matrix q = random_orthogonal(n, rng);
  Matrix qd = q;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) qd(i, j) *= eigenvalues[j];
  Matrix a = gemm(qd, q.transpose());
  if (Q_out) *Q_out = std::move(q);
  return symmetrized(std::move(a));
}

SpdMatrix random_spd(std::size_t n, double cond, Rng& rng,
                     Vector* eigenvalues_out, Matrix* Q_out) {
  Vector lambda(n, 1.0);
  for (std::size_t i = 0; i < n && n > 1; ++i)
    lambda[i] = std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1));
  SpdMatrix a = spd_with_spectrum(lambda, rng, Q_out);
  if (eigenvalues_out) *eigenvalues_out = std::move(lambda);
  return a;
}

}  // namespace defcg
