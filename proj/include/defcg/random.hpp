#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "defcg/dense.hpp"

namespace defcg {

/// mt19937_64 with hand-rolled uniform/normal transforms so that a seed
/// gives the same stream with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }
  double normal();

 private:
  std::mt19937_64 engine_;
};

Vector random_vector(std::size_t n, Rng& rng);
Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng);

/// Orthogonal matrix from modified Gram-Schmidt (applied twice) on a
/// Gaussian matrix.
Matrix random_orthogonal(std::size_t n, Rng& rng);

/// Q diag(eigenvalues) Q^T for a random orthogonal Q, returned in *Q_out.
SpdMatrix spd_with_spectrum(std::span<const double> eigenvalues, Rng& rng,
                            Matrix* Q_out = nullptr);

/// Eigenvalues log-spaced from 1 to `cond` (both included).
SpdMatrix random_spd(std::size_t n, double cond, Rng& rng,
                     Vector* eigenvalues_out = nullptr, Matrix* Q_out = nullptr);

}  // namespace defcg
