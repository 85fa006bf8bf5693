#include "defcg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "defcg/cholesky.hpp"
#include "defcg/errors.hpp"

namespace defcg {

namespace {

double off_diagonal_sq(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return s;
}

void normalize_columns(Matrix& v) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    Vector c = v.column(j);
    const double nrm = norm2(c);
    if (nrm == 0.0) continue;
    double sign = 1.0;
    for (double x : c) {
      if (std::abs(x) > 1e-12 * nrm) {
        sign = x < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (double& x : c) x *= sign / nrm;
    v.set_column(j, c);
  }
}

EigenPairs sorted_pairs(const Matrix& a, const Matrix& v) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) < a(j, j);
  });
  EigenPairs out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  normalize_columns(out.vectors);
  return out;
}

}  // namespace

EigenPairs sym_eigen(const SpdMatrix& A, int max_sweeps) {
  const std::size_t n = A.size();
  Matrix a = A.matrix();
  Matrix v = Matrix::identity(n);

  double frob_sq = 0.0;
  for (double x : a.data()) frob_sq += x * x;
  const double eps = std::numeric_limits<double>::epsilon();
  const double target = eps * eps * frob_sq;

  for (int sweep = 0;; ++sweep) {
    if (off_diagonal_sq(a) <= target) break;
    if (sweep == max_sweeps) throw NoConvergence(max_sweeps);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = c * arq + s * arp;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  return sorted_pairs(a, v);
}

EigenPairs gen_sym_eigen(const SpdMatrix& G, const SpdMatrix& F) {
  if (G.size() != F.size())
    throw DimensionMismatch("gen_sym_eigen: G and F differ in size");
  const std::size_t n = F.size();
  const CholeskyFactor L = cholesky_factor(F);

  // C = L^{-1} G L^{-T}, assembled as L^{-1} (L^{-1} G)^T.
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    m.set_column(j, L.forward(G.matrix().column(j)));
  const Matrix mt = m.transpose();
  Matrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) c.set_column(j, L.forward(mt.column(j)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      c(i, j) = c(j, i) = 0.5 * (c(i, j) + c(j, i));

  EigenPairs std_pairs = sym_eigen(SpdMatrix(std::move(c)));
  Matrix u(n, n);
  for (std::size_t j = 0; j < n; ++j)
    u.set_column(j, L.backward(std_pairs.vectors.column(j)));
  normalize_columns(u);
  return {std::move(std_pairs.values), std::move(u)};
}

}  // namespace defcg
