#include "defcg/recycler.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "defcg/cholesky.hpp"
#include "defcg/errors.hpp"

namespace defcg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix columns_to_matrix(const std::vector<Vector>& cols, std::size_t n) {
  Matrix m(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) m.set_column(j, cols[j]);
  return m;
}

/// Removes index i from a symmetric k x k matrix.
Matrix drop_row_col(const Matrix& m, std::size_t drop) {
  const std::size_t k = m.rows();
  Matrix out(k - 1, k - 1);
  for (std::size_t i = 0, oi = 0; i < k; ++i) {
    if (i == drop) continue;
    for (std::size_t j = 0, oj = 0; j < k; ++j) {
      if (j == drop) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

Matrix symmetric_part(const Matrix& m) {
  Matrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

}  // namespace

RitzExtraction harmonic_ritz_extract(const KrylovLog& log,
                                     const RecycleBasis* prev, std::size_t k,
                                     Selection selection) {
  RitzExtraction ex;
  ex.selection = selection;
  if (log.r.empty()) throw std::invalid_argument("harmonic_ritz_extract: empty log");
  const std::size_t n = log.r.front().size();
  if (k == 0) {
    ex.W_next = Matrix(n, 0);
    ex.AW_next = Matrix(n, 0);
    return ex;
  }

  std::vector<Vector> z;
  std::vector<Vector> az;
  if (prev != nullptr && !prev->empty()) {
    if (prev->W.rows() != n)
      throw DimensionMismatch("harmonic_ritz_extract: basis/log size mismatch");
    for (std::size_t j = 0; j < prev->k(); ++j) {
      z.push_back(prev->W.column(j));
      az.push_back(prev->AW.column(j));
    }
  }
  for (std::size_t j = 0; j < log.size(); ++j) {
    z.push_back(log.p[j]);
    az.push_back(log.image_of_direction(j));
  }

  // Unit-norm columns; exactly zero columns carry nothing and are dropped.
  for (std::size_t j = z.size(); j-- > 0;) {
    const double nrm = norm2(z[j]);
    if (nrm == 0.0) {
      z.erase(z.begin() + static_cast<std::ptrdiff_t>(j));
      az.erase(az.begin() + static_cast<std::ptrdiff_t>(j));
      ++ex.pruned;
      continue;
    }
    for (double& v : z[j]) v /= nrm;
    for (double& v : az[j]) v /= nrm;
  }

  Matrix Z = columns_to_matrix(z, n);
  Matrix AZ = columns_to_matrix(az, n);
  Matrix F = symmetric_part(gemm_tn(AZ, Z));
  Matrix G = symmetric_part(gemm_tn(AZ, AZ));

  // Drop the column whose pivot fails until F factors.
  for (;;) {
    if (F.rows() < k) throw BasisDeficient(F.rows());
    try {
      cholesky_factor(SpdMatrix(F));
      break;
    } catch (const NotPositiveDefinite& e) {
      const std::size_t bad = e.pivot_index;
      F = drop_row_col(F, bad);
      G = drop_row_col(G, bad);
      z.erase(z.begin() + static_cast<std::ptrdiff_t>(bad));
      az.erase(az.begin() + static_cast<std::ptrdiff_t>(bad));
      ++ex.pruned;
    }
  }
  if (ex.pruned > 0) {
    Z = columns_to_matrix(z, n);
    AZ = columns_to_matrix(az, n);
  }

  const EigenPairs pairs = gen_sym_eigen(SpdMatrix(G), SpdMatrix(F));
  const std::size_t m = pairs.values.size();
  ex.theta = pairs.values;
  ex.U = Matrix(m, k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t src = selection == Selection::Smallest ? c : m - k + c;
    ex.U.set_column(c, pairs.vectors.column(src));
  }
  ex.W_next = gemm(Z, ex.U);
  for (std::size_t c = 0; c < k; ++c) {
    const double nrm = norm2(ex.W_next.column(c));
    if (nrm == 0.0) continue;
    for (std::size_t i = 0; i < m; ++i) ex.U(i, c) /= nrm;
  }
  ex.W_next = gemm(Z, ex.U);
  ex.AW_next = gemm(AZ, ex.U);
  ex.Z = std::move(Z);
  ex.AZ = std::move(AZ);
  return ex;
}

RecycleBasis refresh_basis(const SpdMatrix& A_next, const Matrix& W) {
  const std::size_t n = A_next.size();
  if (W.rows() != n) throw DimensionMismatch("refresh_basis: W has wrong row count");
  std::vector<Vector> w;
  std::vector<Vector> aw;
  for (std::size_t j = 0; j < W.cols(); ++j) {
    w.push_back(W.column(j));
    aw.push_back(matvec(A_next, w.back()));
  }
  Matrix gram = symmetric_part(
      gemm_tn(columns_to_matrix(w, n), columns_to_matrix(aw, n)));
  for (;;) {
    if (w.empty()) throw BasisDeficient(0);
    try {
      CholeskyFactor chol = cholesky_factor(SpdMatrix(gram));
      return {columns_to_matrix(w, n), columns_to_matrix(aw, n),
              std::move(chol)};
    } catch (const NotPositiveDefinite& e) {
      gram = drop_row_col(gram, e.pivot_index);
      w.erase(w.begin() + static_cast<std::ptrdiff_t>(e.pivot_index));
      aw.erase(aw.begin() + static_cast<std::ptrdiff_t>(e.pivot_index));
    }
  }
}

Vector solve_next(SequenceState& state, const SpdMatrix& A,
                  std::span<const double> b) {
  const std::size_t n = A.size();
  if (state.x_last.size() != n) state.x_last.assign(n, 0.0);

  SequenceStep step;
  std::optional<RecycleBasis> current;
  auto t0 = Clock::now();
  if (state.k > 0 && state.basis && !state.basis->empty()) {
    try {
      current = refresh_basis(A, state.basis->W);
    } catch (const BasisDeficient&) {
      current.reset();
    }
  }
  step.recycle_time = seconds_since(t0);

  SolveResult res = current
                        ? deflated_cg_solve(A, b, state.x_last, *current, state.cfg)
                        : cg_solve(A, b, state.x_last, state.cfg);
  step.basis_size = current ? current->k() : 0;

  t0 = Clock::now();
  state.basis.reset();
  const std::size_t available = res.log.size() + step.basis_size;
  std::size_t k = std::min(state.k, available);
  const RecycleBasis* prev = current ? &*current : nullptr;
  while (k > 0) {
    try {
      RitzExtraction ex = harmonic_ritz_extract(res.log, prev, k, state.selection);
      state.basis = RecycleBasis{std::move(ex.W_next), std::move(ex.AW_next), {}};
      break;
    } catch (const BasisDeficient& e) {
      k = std::min(k - 1, e.remaining);
    }
  }
  step.recycle_time += seconds_since(t0);

  step.report = std::move(res.report);
  state.history.push_back(std::move(step));
  state.x_last = res.x;
  return std::move(res.x);
}

ConditionNumbers condition_numbers(const SpdMatrix& A, std::size_t k) {
  if (k >= A.size())
    throw std::invalid_argument("condition_numbers: k must be smaller than n");
  const Vector lambda = sym_eigen(A).values;
  const double top = lambda.back();
  return {top / lambda.front(), top / lambda[k]};
}

Vector deflated_spectrum(const SpdMatrix& A, const RecycleBasis& basis) {
  const std::size_t n = A.size();
  Matrix pa(n, n);
  for (std::size_t j = 0; j < n; ++j)
    pa.set_column(j, apply_deflation_projector(A, basis, A.matrix().column(j)));
  return sym_eigen(SpdMatrix(symmetric_part(pa))).values;
}

}  // namespace defcg
