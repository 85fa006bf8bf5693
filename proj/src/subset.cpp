#include "defcg/subset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "defcg/cholesky.hpp"
#include "defcg/errors.hpp"

namespace defcg {

std::size_t subset_size(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("subset fraction must lie in (0, 1]");
  if (fraction * static_cast<double>(n) < 1.0)
    throw std::invalid_argument("subset fraction selects no points");
  const auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(m, 1, n);
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m,
                                        std::uint64_t seed) {
  if (m > n) throw std::invalid_argument("sample_indices: m > n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates on mt19937_64, whose output sequence is fixed by
  // the standard (unlike the std distributions).
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

Matrix select_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = X.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

SubsetModel fit_subset(const Matrix& X, const Labels& y, double fraction,
                       const KernelParams& params, const NewtonOptions& opts,
                       std::uint64_t seed) {
  const std::size_t n = X.rows();
  if (y.size() != n) throw DimensionMismatch("fit_subset: X and y differ in size");
  SubsetModel model;
  model.n = n;
  model.indices_m = sample_indices(n, subset_size(fraction, n), seed);
  std::vector<bool> chosen(n, false);
  for (std::size_t i : model.indices_m) chosen[i] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!chosen[i]) model.indices_rest.push_back(i);

  const Matrix Xm = select_rows(X, model.indices_m);
  Labels ym;
  ym.reserve(model.indices_m.size());
  for (std::size_t i : model.indices_m) ym.push_back(y[i]);

  auto K_mm = std::make_shared<const SpdMatrix>(rbf_kernel(Xm, params));
  model.K_rest_m = rbf_cross_kernel(select_rows(X, model.indices_rest), Xm, params);

  LaplaceResult fit = laplace_newton(
      K_mm, ym, SolverChoice::cholesky(), SolverConfig{}, opts,
      [&](const GpcState& s, const NewtonRecord& rec) {
        model.f_m_history.push_back(s.f);
        model.cumulative_times.push_back(rec.cumulative_time);
      });
  model.f_m = std::move(fit.state.f);
  model.K_mm = *K_mm;
  return model;
}

Vector induce_latents(const SubsetModel& model, std::span<const double> f_m) {
  if (model.indices_rest.empty()) return {};
  const Vector coeff = cholesky_solve(cholesky_factor(model.K_mm), f_m);
  return matvec(model.K_rest_m, coeff);
}

Vector induce_latents(const SubsetModel& model) {
  return induce_latents(model, model.f_m);
}

Vector assemble_latents(const SubsetModel& model, std::span<const double> f_m) {
  if (f_m.size() != model.indices_m.size())
    throw DimensionMismatch("assemble_latents: f_m has wrong length");
  const Vector induced = induce_latents(model, f_m);
  Vector f(model.n, 0.0);
  for (std::size_t i = 0; i < model.indices_m.size(); ++i) f[model.indices_m[i]] = f_m[i];
  for (std::size_t i = 0; i < model.indices_rest.size(); ++i)
    f[model.indices_rest[i]] = induced[i];
  return f;
}

double evaluate_full(const SubsetModel& model, const Labels& y,
                     std::span<const double> f_m) {
  return likelihood_derivs(assemble_latents(model, f_m), y).loglik;
}

double evaluate_full(const SubsetModel& model, const Labels& y) {
  return evaluate_full(model, y, model.f_m);
}

}  // namespace defcg
