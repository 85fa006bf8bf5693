#include "defcg/validate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <ostream>
#include <string>

#include "defcg/cholesky.hpp"
#include "defcg/eigen.hpp"
#include "defcg/gpc.hpp"
#include "defcg/krylov.hpp"
#include "defcg/random.hpp"
#include "defcg/recycler.hpp"

namespace defcg {

namespace {

double rel_diff(std::span<const double> a, std::span<const double> b) {
  return norm2(subtract(a, b)) / norm2(b);
}

bool check_solvers_match_cholesky(Rng& rng) {
  SolverConfig cfg;
  cfg.tol = 1e-10;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = rng.index(5, 40);
    const SpdMatrix A = random_spd(n, std::pow(10.0, rng.uniform(0.0, 4.0)), rng);
    const Vector b = random_vector(n, rng);
    const Vector exact = cholesky_solve(cholesky_factor(A), b);
    const Vector zero(n, 0.0);
    if (rel_diff(cg_solve(A, b, zero, cfg).x, exact) > 1e-8) return false;
    const RecycleBasis basis = make_basis(A, random_matrix(n, rng.index(1, 4), rng));
    if (rel_diff(deflated_cg_solve(A, b, zero, basis, cfg).x, exact) > 1e-8) return false;
  }
  return true;
}

bool check_k0_reduction(Rng& rng) {
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = rng.index(5, 40);
    const SpdMatrix A = random_spd(n, 1e3, rng);
    const Vector b = random_vector(n, rng);
    const Vector x0(n, 0.0);
    const SolverConfig cfg;
    if (cg_solve(A, b, x0, cfg).report.residual_history !=
        deflated_cg_solve(A, b, x0, RecycleBasis{}, cfg).report.residual_history)
      return false;
  }
  return true;
}

bool check_deflation_orthogonality(Rng& rng) {
  SolverConfig cfg;
  cfg.tol = 1e-10;
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = rng.index(10, 40);
    const SpdMatrix A = random_spd(n, 1e4, rng);
    const Vector b = random_vector(n, rng);
    const RecycleBasis basis = make_basis(A, random_matrix(n, 3, rng));
    double r0 = -1.0;
    bool ok = true;
    deflated_cg_solve(A, b, Vector(n, 0.0), basis, cfg,
                      [&](std::size_t j, std::span<const double>, std::span<const double> r) {
                        if (j == 0) r0 = norm2(r);
                        if (norm_inf(matvec_transposed(basis.W, r)) > 1e-8 * r0) ok = false;
                      });
    if (!ok) return false;
  }
  return true;
}

bool check_spectral_deflation(Rng& rng) {
  const std::size_t n = 8;
  Vector lambda;
  Matrix Q;
  const SpdMatrix A = random_spd(n, 100.0, rng, &lambda, &Q);
  Matrix W(n, 2);
  W.set_column(0, Q.column(1));
  W.set_column(1, Q.column(5));
  Vector expected = lambda;
  expected[1] = expected[5] = 0.0;
  std::sort(expected.begin(), expected.end());
  const Vector got = deflated_spectrum(A, make_basis(A, W));
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(got[i] - expected[i]) > 1e-8) return false;
  return true;
}

bool check_ritz_recovery(Rng& rng) {
  const std::size_t n = 6;
  Vector diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 + static_cast<double>(i) * 1.5;
  const SpdMatrix A(Matrix::diagonal(diag));
  Vector b(n);
  for (double& v : b) v = 1.0 + rng.uniform();
  SolverConfig cfg;
  cfg.tol = 1e-300;
  cfg.max_iters = n;
  cfg.ell = n;
  const SolveResult res = cg_solve(A, b, Vector(n, 0.0), cfg);
  const RitzExtraction ex = harmonic_ritz_extract(res.log, nullptr, n);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(ex.theta[i] - diag[i]) > 1e-6) return false;
  return true;
}

bool check_newton_eigen_floor(Rng& rng) {
  const std::size_t n = 30;
  Matrix X = random_matrix(n, 2, rng);
  Labels y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = X(i, 0) > 0 ? 1 : -1;
  auto K = std::make_shared<const SpdMatrix>(rbf_kernel(X, {1.0, 1.0}));
  GpcState s = initial_state(K, y);
  for (int it = 0; it < 4; ++it) {
    const NewtonSystem sys = build_newton_system(s);
    if (sym_eigen(sys.A).values.front() < 1.0 - 1e-8) return false;
    s = newton_update(s, cholesky_solve(cholesky_factor(sys.A), sys.b));
  }
  return true;
}

bool check_psi_gradient(Rng& rng) {
  const std::size_t n = 8;
  Matrix X = random_matrix(n, 2, rng);
  Labels y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? 1 : -1;
  const SpdMatrix K = rbf_kernel(X, {1.0, 1.5}, 1e-2);
  const CholeskyFactor L = cholesky_factor(K);
  auto psi = [&](const Vector& f) {
    return likelihood_derivs(f, y).loglik - 0.5 * dot(f, cholesky_solve(L, f));
  };
  const Vector f = random_vector(n, rng);
  const Vector a = cholesky_solve(L, f);
  const Vector analytic = subtract(likelihood_derivs(f, y).grad, a);
  Vector fd(n);
  const double h = 1e-5;
  for (std::size_t i = 0; i < n; ++i) {
    Vector fp = f, fm = f;
    fp[i] += h;
    fm[i] -= h;
    fd[i] = (psi(fp) - psi(fm)) / (2 * h);
  }
  return rel_diff(analytic, fd) <= 1e-5;
}

}  // namespace

bool run_validation(std::uint64_t seed, std::ostream& out) {
  struct Check {
    const char* name;
    std::function<bool(Rng&)> run;
  };
  const Check checks[] = {
      {"iterative solvers match Cholesky", check_solvers_match_cholesky},
      {"k = 0 deflated CG reproduces CG", check_k0_reduction},
      {"deflated residuals stay orthogonal to W", check_deflation_orthogonality},
      {"deflation zeroes the targeted eigenvalues", check_spectral_deflation},
      {"harmonic Ritz values recover a diagonal spectrum", check_ritz_recovery},
      {"Newton systems have eigenvalues >= 1", check_newton_eigen_floor},
      {"objective gradient matches finite differences", check_psi_gradient},
  };
  bool all = true;
  Rng rng(seed);
  for (const Check& c : checks) {
    bool ok = false;
    std::string detail;
    try {
      ok = c.run(rng);
    } catch (const std::exception& e) {
      detail = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "PASS " : "FAIL ") << c.name << detail << '\n';
    all = all && ok;
  }
  return all;
}

}  // namespace defcg
