#pragma once

#include "defcg/dense.hpp"

namespace defcg {

/// Eigenvalues in ascending order; eigenvector j is column j of `vectors`,
/// scaled to unit 2-norm with its first significant entry positive.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigensolver for small symmetric matrices.
/// Throws NoConvergence after `max_sweeps` sweeps.
EigenPairs sym_eigen(const SpdMatrix& A, int max_sweeps = kJacobiMaxSweeps);

/// Generalized problem G u = theta F u with F SPD, by reduction to the
/// standard problem on L^{-1} G L^{-T} where F = L L^T.
/// Throws NotPositiveDefinite when F cannot be factored.
EigenPairs gen_sym_eigen(const SpdMatrix& G, const SpdMatrix& F);

}  // namespace defcg
