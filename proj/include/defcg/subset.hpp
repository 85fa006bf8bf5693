#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "defcg/dense.hpp"
#include "defcg/gpc.hpp"

namespace defcg {

/// Laplace fit on a random subset X_m; the other latents are induced by
/// the conditional mean K_{(n-m)m} K_mm^{-1} f_m.
struct SubsetModel {
  /// Sorted subset indices into the full data.
  std::vector<std::size_t> indices_m;
  /// The complement, also sorted.
  std::vector<std::size_t> indices_rest;
  SpdMatrix K_mm;
  Matrix K_rest_m;
  Vector f_m;
  /// f_m after each Newton iteration, and the cumulative solve time then.
  std::vector<Vector> f_m_history;
  std::vector<double> cumulative_times;
  std::size_t n = 0;
};

/// Subset size for `fraction` of n points: round(fraction * n), at least 1.
/// Throws std::invalid_argument unless fraction in (0, 1] and fraction*n >= 1.
std::size_t subset_size(double fraction, std::size_t n);

/// Seeded uniform sample of m distinct indices from [0, n), sorted.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m,
                                        std::uint64_t seed);

/// Cholesky-based Laplace fit on the sampled subset.
SubsetModel fit_subset(const Matrix& X, const Labels& y, double fraction,
                       const KernelParams& params, const NewtonOptions& opts,
                       std::uint64_t seed);

/// K_{(n-m)m} K_mm^{-1} f_m in the order of indices_rest.
Vector induce_latents(const SubsetModel& model);
Vector induce_latents(const SubsetModel& model, std::span<const double> f_m);

/// Full-length f (subset latents plus induced ones, original order).
Vector assemble_latents(const SubsetModel& model, std::span<const double> f_m);

/// log p(y|f) over all n points using the assembled latents.
double evaluate_full(const SubsetModel& model, const Labels& y);
double evaluate_full(const SubsetModel& model, const Labels& y,
                     std::span<const double> f_m);

}  // namespace defcg
