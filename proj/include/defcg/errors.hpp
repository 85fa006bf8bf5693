#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace defcg {

/// Base class of every failure raised by a numerical routine.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky met a pivot at or below the pivot tolerance.
class NotPositiveDefinite : public NumericalError {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : NumericalError("matrix is not positive definite (pivot " +
                       std::to_string(pivot) + ")"),
        pivot_index(pivot) {}
  std::size_t pivot_index;
};

class NoConvergence : public NumericalError {
 public:
  explicit NoConvergence(int n_sweeps)
      : NumericalError("Jacobi eigensolver did not converge after " +
                       std::to_string(n_sweeps) + " sweeps"),
        sweeps(n_sweeps) {}
  int sweeps;
};

/// p^T A p <= 0 inside CG; the operator is not SPD.
class BreakdownZeroCurvature : public NumericalError {
 public:
  explicit BreakdownZeroCurvature(std::size_t j)
      : NumericalError("CG breakdown: non-positive curvature at iteration " +
                       std::to_string(j)),
        iteration(j) {}
  std::size_t iteration;
};

/// The k x k Gram matrix W^T A W could not be factored.
class GramNotSpd : public NumericalError {
 public:
  explicit GramNotSpd(std::size_t pivot)
      : NumericalError("deflation Gram matrix W^T A W is not SPD (pivot " +
                       std::to_string(pivot) + ")"),
        pivot_index(pivot) {}
  std::size_t pivot_index;
};

/// Column pruning left fewer basis vectors than requested.
class BasisDeficient : public NumericalError {
 public:
  explicit BasisDeficient(std::size_t left)
      : NumericalError("recycle basis deficient: " + std::to_string(left) +
                       " independent columns remain"),
        remaining(left) {}
  std::size_t remaining;
};

class InvalidLabel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StateInconsistent : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The Newton objective decreased; the inner solves are too inexact.
class NoProgress : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace defcg
