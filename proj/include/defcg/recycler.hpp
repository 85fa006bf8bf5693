#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "defcg/dense.hpp"
#include "defcg/eigen.hpp"
#include "defcg/krylov.hpp"

namespace defcg {

enum class Selection { Smallest, Largest };

/// Harmonic Ritz extraction over Z = [W_prev | p_0 ... p_{m-1}].
///
/// Z is stored with unit-norm columns (a diagonal rescaling leaves the Ritz
/// pairs unchanged) and after pruning of dependent columns. U selects k of
/// the generalized eigenvectors and is scaled so that W_next = Z U has
/// unit-norm columns. AW_next = (AZ) U is the image under the matrix the
/// log came from.
struct RitzExtraction {
  Vector theta;
  Matrix U;
  Matrix Z;
  Matrix AZ;
  Matrix W_next;
  Matrix AW_next;
  Selection selection = Selection::Smallest;
  std::size_t pruned = 0;
};

/// Solves G u = theta F u with F = (AZ)^T Z and G = (AZ)^T (AZ), where A Z
/// comes from the stored A W_prev and the residual recurrence, so no new
/// matrix-vector products are needed. `prev` must be the basis the logged
/// solve ran with (or null for plain CG).
/// Throws BasisDeficient when fewer than k independent columns remain.
RitzExtraction harmonic_ritz_extract(const KrylovLog& log,
                                     const RecycleBasis* prev, std::size_t k,
                                     Selection selection = Selection::Smallest);

/// Recomputes A W for a new matrix and factors W^T A W, dropping columns
/// whose Gram pivot falls below the Cholesky tolerance.
/// Throws BasisDeficient{0} when every column is pruned.
RecycleBasis refresh_basis(const SpdMatrix& A_next, const Matrix& W);

struct SequenceStep {
  SolveReport report;
  /// Seconds spent refreshing the basis and extracting the next one.
  double recycle_time = 0.0;
  /// Deflation basis size used for this solve (0 = plain CG).
  std::size_t basis_size = 0;
};

/// Single-owner state carried across a sequence of related SPD solves.
///
/// `basis` holds the W to recycle into the next system. Its AW belongs to
/// the previous system and its Gram factor is left empty; solve_next always
/// refreshes it against the new matrix. A caller with prior knowledge of
/// the first system's eigenvectors can seed `basis->W` directly.
struct SequenceState {
  std::optional<RecycleBasis> basis;
  Vector x_last;
  std::vector<SequenceStep> history;
  std::size_t k = 8;
  SolverConfig cfg;
  Selection selection = Selection::Smallest;
};

/// Solves A x = b as the next member of the sequence and prepares the
/// basis for the following one. Without a basis (or with k = 0) this is
/// cg_solve warm-started at the previous solution.
Vector solve_next(SequenceState& state, const SpdMatrix& A,
                  std::span<const double> b);

struct ConditionNumbers {
  double kappa = 0.0;
  double kappa_eff = 0.0;
};

/// kappa = lambda_n / lambda_1, kappa_eff = lambda_n / lambda_{k+1}.
ConditionNumbers condition_numbers(const SpdMatrix& A, std::size_t k);

/// Ascending eigenvalues of P_W A, formed explicitly. P_W A is symmetric
/// (A - AW (W^T A W)^{-1} (AW)^T), so the symmetric solver applies.
Vector deflated_spectrum(const SpdMatrix& A, const RecycleBasis& basis);

}  // namespace defcg
