#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "defcg/cholesky.hpp"
#include "defcg/dense.hpp"

namespace defcg {

// Residuals follow r = b - A x throughout, the negative gradient of the
// quadratic 0.5 x^T A x - b^T x.

struct SolverConfig {
  /// Stop once ||b - A x|| / ||b|| <= tol.
  double tol = 1e-5;
  /// 0 selects 10 * n.
  std::size_t max_iters = 0;
  /// Number of leading iterations recorded in the KrylovLog.
  std::size_t ell = 12;
  /// Every this many iterations compare the recurrence residual with
  /// b - A x and replace it when it has drifted (relative gap above
  /// sqrt(eps)) and the residual has fallen 100-fold since the last
  /// replacement; 0 disables the check.
  std::size_t recompute_residual_every = 50;

  /// Throws std::invalid_argument on tol <= 0.
  void validate() const;
  std::size_t iteration_cap(std::size_t n) const {
    return max_iters == 0 ? 10 * n : max_iters;
  }
};

/// Quantities kept from the first m = min(ell, iterations) iterations.
///
/// p[j], alpha[j], d[j] = p_j^T A p_j, beta[j] and mu[j] belong to iteration
/// j; r holds r_0 ... r_m, so A p_j = (r[j] - r[j+1]) / alpha[j]. mu is
/// empty for plain CG.
struct KrylovLog {
  Vector d;
  Vector alpha;
  Vector beta;
  std::vector<Vector> mu;
  std::vector<Vector> p;
  std::vector<Vector> r;

  std::size_t size() const noexcept { return p.size(); }
  /// A p_j recovered from the residual recurrence.
  Vector image_of_direction(std::size_t j) const;
};

enum class Termination { Converged, MaxIters };

struct SolveReport {
  std::size_t iterations = 0;
  /// ||r_j|| / ||b|| for j = 0 ... iterations.
  Vector residual_history;
  bool converged = false;
  double wall_time = 0.0;
  Termination termination = Termination::MaxIters;

  double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
};

/// Deflation space for one particular matrix A: W, its image A W and the
/// Cholesky factor of W^T A W. An empty basis (k = 0) disables deflation.
struct RecycleBasis {
  Matrix W;
  Matrix AW;
  CholeskyFactor gram_chol;

  std::size_t k() const noexcept { return W.cols(); }
  bool empty() const noexcept { return W.cols() == 0; }
};

struct SolveResult {
  Vector x;
  SolveReport report;
  KrylovLog log;
};

/// Called with (j, x_j, r_j) after the initial residual and after every
/// iteration. Used by diagnostics that need more than the logged window.
using IterationObserver =
    std::function<void(std::size_t, std::span<const double>,
                       std::span<const double>)>;

SolveResult cg_solve(const SpdMatrix& A, std::span<const double> b,
                     std::span<const double> x0, const SolverConfig& cfg,
                     const IterationObserver& observer = {});

/// Deflated CG warm-started at x_prev. The initial iterate is shifted so
/// that W^T r_0 = 0, and every new direction is A-conjugated against W.
/// With an empty basis this is exactly cg_solve.
SolveResult deflated_cg_solve(const SpdMatrix& A, std::span<const double> b,
                              std::span<const double> x_prev,
                              const RecycleBasis& basis,
                              const SolverConfig& cfg,
                              const IterationObserver& observer = {});

/// P_W v = v - A W (W^T A W)^{-1} W^T v.
Vector apply_deflation_projector(const SpdMatrix& A, const RecycleBasis& basis,
                                 std::span<const double> v);

/// Builds a basis for A from W without pruning. Throws GramNotSpd.
RecycleBasis make_basis(const SpdMatrix& A, Matrix W);

}  // namespace defcg
