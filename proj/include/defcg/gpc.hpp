#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "defcg/dense.hpp"
#include "defcg/krylov.hpp"
#include "defcg/recycler.hpp"

namespace defcg {

/// k(x, x') = signal_sd^2 exp(-|x - x'|^2 / (2 lengthscale^2))
struct KernelParams {
  double signal_sd = 1.0;
  double lengthscale = 1.0;

  void validate() const;
};

/// Labels in {-1, +1}.
using Labels = std::vector<int>;

/// Gram matrix over the rows of X with `jitter` added to the diagonal.
/// The default jitter is 1e-8 * signal_sd^2.
SpdMatrix rbf_kernel(const Matrix& X, const KernelParams& params,
                     std::optional<double> jitter = std::nullopt);

/// Cross-kernel between the rows of X1 and the rows of X2.
Matrix rbf_cross_kernel(const Matrix& X1, const Matrix& X2,
                        const KernelParams& params);

/// Median Euclidean distance over pairs of the first `max_points` rows.
double median_pairwise_distance(const Matrix& X, std::size_t max_points = 1000);

struct LikelihoodDerivs {
  double loglik = 0.0;
  /// d log p(y|f) / df = (y + 1)/2 - sigma(f)
  Vector grad;
  /// -d^2 log p(y|f) / df^2 = sigma(f) (1 - sigma(f))
  Vector H;
};

/// Logistic likelihood sum_i log sigma(y_i f_i) and its derivatives.
/// Throws InvalidLabel for labels outside {-1, +1}.
LikelihoodDerivs likelihood_derivs(std::span<const double> f, const Labels& y);

/// Latent state of the Laplace mode search. f = K a is kept exactly by
/// computing f from a after every update.
struct GpcState {
  Vector f;
  Vector a;
  Labels y;
  std::shared_ptr<const SpdMatrix> K;
  double loglik = 0.0;
  Vector grad_loglik;
  Vector H;
};

/// f = a = 0 with derivatives evaluated there.
GpcState initial_state(std::shared_ptr<const SpdMatrix> K, Labels y);

/// A = I + H^{1/2} K H^{1/2}, b = H^{1/2} K (H f + grad log p).
struct NewtonSystem {
  SpdMatrix A;
  Vector b;
  Vector sqrtH;
};

NewtonSystem build_newton_system(const GpcState& state);

/// a_new = (H f + grad) - H^{1/2} x, f_new = K a_new, derivatives refreshed.
GpcState newton_update(const GpcState& state, std::span<const double> x);

/// log p(y|f) - f^T a / 2; the f-independent terms of the log posterior are
/// left out. Throws StateInconsistent if |f - K a| > 1e-8 |f|.
double psi_objective(const GpcState& state);

enum class SolverKind { Cholesky, CG, DefCG };

struct SolverChoice {
  SolverKind kind = SolverKind::Cholesky;
  std::size_t k = 8;
  std::size_t ell = 12;
  Selection selection = Selection::Smallest;

  static SolverChoice cholesky() { return {SolverKind::Cholesky}; }
  static SolverChoice cg() { return {SolverKind::CG, 0}; }
  static SolverChoice def_cg(std::size_t k, std::size_t ell,
                             Selection sel = Selection::Smallest) {
    return {SolverKind::DefCG, k, ell, sel};
  }
  /// "Cholesky", "CG" or "def-CG(k=8,l=12)".
  std::string name() const;
};

struct NewtonOptions {
  /// Stop once the objective gains less than this.
  double newton_tol = 1.0;
  std::size_t max_newton_iters = 30;
  /// Largest tolerated decrease of the objective before NoProgress.
  double max_decrease = 1e-6;
  /// Start each iterative solve at the previous Newton system's solution
  /// instead of zero.
  bool warm_start = true;
};

struct NewtonRecord {
  std::size_t newton_iter = 0;
  double psi = 0.0;
  double loglik = 0.0;
  std::size_t solver_iterations = 0;
  /// Linear solve time, plus basis refresh and extraction for def-CG.
  double solve_time = 0.0;
  double cumulative_time = 0.0;
  /// ||b - A x|| / ||b|| of the returned solution.
  double rel_residual = 0.0;
  Vector residual_history;
  std::size_t basis_size = 0;
};

struct LaplaceResult {
  GpcState state;
  std::vector<NewtonRecord> records;
};

using NewtonObserver = std::function<void(const GpcState&, const NewtonRecord&)>;

/// Newton iteration for the Laplace mode from f = 0. For def-CG the
/// recycle basis is carried across Newton steps. With opts.warm_start, CG
/// and def-CG both start at the previous Newton system's solution.
/// Throws NoProgress if the objective drops by more than max_decrease.
LaplaceResult laplace_newton(std::shared_ptr<const SpdMatrix> K, const Labels& y,
                             const SolverChoice& solver, const SolverConfig& cfg,
                             const NewtonOptions& opts = {},
                             const NewtonObserver& observer = {});

}  // namespace defcg
