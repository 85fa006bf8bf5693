#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "defcg/cholesky.hpp"
#include "defcg/data.hpp"
#include "defcg/errors.hpp"
#include "defcg/gpc.hpp"
#include "defcg/report.hpp"
#include "defcg/subset.hpp"

using namespace defcg;

namespace {

const KernelParams kParams{2.0, 1.0};

NewtonOptions tight_newton() {
  NewtonOptions o;
  o.newton_tol = 1e-9;
  return o;
}

}  // namespace

TEST_CASE("subset_size rounds and validates") {
  CHECK(subset_size(1.0, 10) == 10);
  CHECK(subset_size(0.05, 2000) == 100);
  CHECK(subset_size(0.25, 10) == 3);
  CHECK(subset_size(0.1, 10) == 1);
  CHECK_THROWS_AS(subset_size(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(subset_size(1.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(subset_size(0.01, 10), std::invalid_argument);
}

TEST_CASE("sample_indices is a sorted, distinct, seeded sample") {
  const auto a = sample_indices(100, 30, 7);
  CHECK(a.size() == 30);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 30);
  CHECK(a.back() < 100);
  CHECK(a == sample_indices(100, 30, 7));
  CHECK(a != sample_indices(100, 30, 8));
  CHECK(sample_indices(5, 5, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(sample_indices(3, 4, 0), std::invalid_argument);
}

TEST_CASE("fraction 1 reproduces the full fit") {
  const Dataset ds = gen_synthetic(40, 2, 3, 2.0);
  const SubsetModel model = fit_subset(ds.X, ds.y, 1.0, kParams, tight_newton(), 0);
  CHECK(model.indices_m.size() == 40);
  CHECK(model.indices_rest.empty());
  CHECK(induce_latents(model).empty());

  const LaplaceResult full =
      laplace_newton(std::make_shared<const SpdMatrix>(rbf_kernel(ds.X, kParams)), ds.y,
                     SolverChoice::cholesky(), SolverConfig{}, tight_newton());
  CHECK(norm2(subtract(model.f_m, full.state.f)) <= 1e-10 * norm2(full.state.f));
  CHECK(evaluate_full(model, ds.y) == doctest::Approx(full.state.loglik).epsilon(1e-12));
}

TEST_CASE("a single-point subset converges") {
  const Dataset ds = gen_synthetic(20, 2, 1, 2.0);
  const SubsetModel model = fit_subset(ds.X, ds.y, 0.05, kParams, tight_newton(), 4);
  CHECK(model.indices_m.size() == 1);
  CHECK(model.indices_rest.size() == 19);
  CHECK(model.f_m.size() == 1);
  CHECK(model.f_m[0] * ds.y[model.indices_m[0]] > 0.0);
  CHECK(induce_latents(model).size() == 19);
}

TEST_CASE("subset fits are deterministic") {
  const Dataset ds = gen_synthetic(60, 3, 2, 2.0);
  const SubsetModel a = fit_subset(ds.X, ds.y, 0.3, kParams, {}, 11);
  const SubsetModel b = fit_subset(ds.X, ds.y, 0.3, kParams, {}, 11);
  CHECK(a.indices_m == b.indices_m);
  CHECK(a.f_m == b.f_m);
  CHECK(a.f_m_history == b.f_m_history);
  CHECK(a.cumulative_times.size() == a.f_m_history.size());
}

TEST_CASE("induce_latents with an identity kernel block") {
  SubsetModel model;
  model.n = 5;
  model.indices_m = {0, 1, 2};
  model.indices_rest = {3, 4};
  model.K_mm = SpdMatrix(Matrix::identity(3));
  model.K_rest_m = Matrix{{0, 1, 0}, {0, 0, 1}};
  model.f_m = {0.5, -1.5, 2.5};
  CHECK(induce_latents(model) == Vector{-1.5, 2.5});
  CHECK(assemble_latents(model, model.f_m) == Vector{0.5, -1.5, 2.5, -1.5, 2.5});
  CHECK_THROWS_AS(assemble_latents(model, Vector{1}), DimensionMismatch);
}

TEST_CASE("induce_latents on a three-point line") {
  // Endpoints at 0 and 2 in the subset, the middle point at 1 induced.
  const Matrix X{{0.0}, {1.0}, {2.0}};
  const KernelParams p{1.0, 1.0};
  SubsetModel model;
  model.n = 3;
  model.indices_m = {0, 2};
  model.indices_rest = {1};
  model.K_mm = rbf_kernel(Matrix{{0.0}, {2.0}}, p);
  model.K_rest_m = rbf_cross_kernel(Matrix{{1.0}}, Matrix{{0.0}, {2.0}}, p);
  model.f_m = {1.0, -2.0};

  const double k11 = 1.0 + 1e-8, k12 = std::exp(-2.0), c = std::exp(-0.5);
  const double det = k11 * k11 - k12 * k12;
  const double w0 = (k11 * c - k12 * c) / det;
  const double expected = w0 * 1.0 + w0 * -2.0;
  const Vector got = induce_latents(model);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("evaluate_full examples") {
  const Dataset ds = gen_synthetic(30, 2, 5, 2.0);
  const SubsetModel model = fit_subset(ds.X, ds.y, 0.4, kParams, {}, 2);
  CHECK(evaluate_full(model, ds.y, Vector(model.indices_m.size(), 0.0)) ==
        doctest::Approx(-30 * std::log(2.0)));

  // Brute-force reassembly.
  const Vector coeff = cholesky_solve(cholesky_factor(model.K_mm), model.f_m);
  double ll = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    double f = 0.0;
    const auto it = std::find(model.indices_m.begin(), model.indices_m.end(), i);
    if (it != model.indices_m.end()) {
      f = model.f_m[static_cast<std::size_t>(it - model.indices_m.begin())];
    } else {
      for (std::size_t j = 0; j < model.indices_m.size(); ++j) {
        const auto xi = ds.X.row(i);
        const auto xj = ds.X.row(model.indices_m[j]);
        double d2 = 0.0;
        for (std::size_t c = 0; c < xi.size(); ++c) d2 += (xi[c] - xj[c]) * (xi[c] - xj[c]);
        f += 4.0 * std::exp(-0.5 * d2) * coeff[j];
      }
    }
    ll += -std::log1p(std::exp(-ds.y[i] * f));
  }
  CHECK(evaluate_full(model, ds.y) == doctest::Approx(ll).epsilon(1e-10));
}

TEST_CASE("subset error plateaus above the full-data error") {
  const Dataset ds = gen_synthetic(400, 2, 0, 2.0);
  const KernelParams p{5.0, median_pairwise_distance(ds.X)};
  const LaplaceResult full =
      laplace_newton(std::make_shared<const SpdMatrix>(rbf_kernel(ds.X, p)), ds.y,
                     SolverChoice::cholesky(), SolverConfig{}, NewtonOptions{});
  const double ref = full.state.loglik;
  for (double fraction : {0.05, 0.25}) {
    const SubsetModel model = fit_subset(ds.X, ds.y, fraction, p, tight_newton(), 0);
    REQUIRE(model.f_m_history.size() >= 2);
    const std::size_t last = model.f_m_history.size() - 1;
    const double e_last = relative_error(evaluate_full(model, ds.y, model.f_m_history[last]), ref);
    const double e_prev = relative_error(evaluate_full(model, ds.y, model.f_m_history[last - 1]), ref);
    CHECK(std::abs(e_last - e_prev) < 0.01 * e_last);
    CHECK(e_last > 1e-3);
  }
}
