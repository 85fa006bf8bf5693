#include <doctest.h>

#include <cmath>
#include <memory>

#include "defcg/cholesky.hpp"
#include "defcg/data.hpp"
#include "defcg/eigen.hpp"
#include "defcg/errors.hpp"
#include "defcg/gpc.hpp"
#include "defcg/random.hpp"

using namespace defcg;

namespace {

std::shared_ptr<const SpdMatrix> shared(SpdMatrix K) {
  return std::make_shared<const SpdMatrix>(std::move(K));
}

double log_sigmoid_ref(double z) { return -std::log1p(std::exp(-z)); }

// Dense solve of a general square system; used as an oracle independent
// of the symmetric restructuring.
Vector gauss_solve(Matrix A, Vector b) {
  const std::size_t n = A.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
    for (std::size_t j = 0; j < n; ++j) std::swap(A(c, j), A(piv, j));
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A(r, c) / A(c, c);
      for (std::size_t j = c; j < n; ++j) A(r, j) -= f * A(c, j);
      b[r] -= f * b[c];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

struct Problem {
  std::shared_ptr<const SpdMatrix> K;
  Labels y;
};

Problem small_problem(std::size_t n, std::uint64_t seed, double theta = 2.0) {
  const Dataset ds = gen_synthetic(n, 2, seed, 2.0);
  return {shared(rbf_kernel(ds.X, {theta, 1.0})), ds.y};
}

SolverConfig tight() {
  SolverConfig cfg;
  cfg.tol = 1e-10;
  return cfg;
}

}  // namespace

TEST_CASE("rbf_kernel examples") {
  const Matrix X{{0, 0}, {1, 1}};
  const SpdMatrix K = rbf_kernel(X, {1.0, 1.0}, 0.0);
  CHECK(K(0, 0) == 1.0);
  CHECK(K(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(K(0, 1) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(K(1, 0) == K(0, 1));

  CHECK(rbf_kernel(X, {2.0, 1.0}, 0.0)(1, 1) == 4.0);
  CHECK(rbf_kernel(X, {2.0, 1.0})(1, 1) == doctest::Approx(4.0 + 4e-8).epsilon(1e-15));
  CHECK_THROWS_AS(rbf_kernel(X, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(rbf_kernel(X, {1.0, 1.0}, -1.0), std::invalid_argument);

  const Matrix C = rbf_cross_kernel(X, Matrix{{1, 1}}, {1.0, 1.0});
  CHECK(C(0, 0) == doctest::Approx(std::exp(-1.0)));
  CHECK(C(1, 0) == 1.0);

  CHECK(median_pairwise_distance(Matrix{{0}, {1}, {3}}) == 2.0);
}

TEST_CASE("likelihood_derivs at f = 0") {
  const LikelihoodDerivs d = likelihood_derivs(Vector{0, 0}, Labels{1, -1});
  CHECK(d.loglik == doctest::Approx(-2 * std::log(2.0)));
  CHECK(d.grad[0] == doctest::Approx(0.5));
  CHECK(d.grad[1] == doctest::Approx(-0.5));
  CHECK(d.H == Vector{0.25, 0.25});
}

TEST_CASE("likelihood_derivs saturates without overflow") {
  const LikelihoodDerivs d = likelihood_derivs(Vector{30.0}, Labels{1});
  CHECK(std::abs(d.grad[0]) < 1e-12);
  CHECK(d.H[0] == doctest::Approx(9.357622968839e-14).epsilon(1e-9));
  CHECK(d.loglik == doctest::Approx(-9.357622968840e-14).epsilon(1e-9));

  const LikelihoodDerivs far = likelihood_derivs(Vector{-800.0, 800.0}, Labels{1, -1});
  CHECK(std::isfinite(far.loglik));
  CHECK(far.loglik == doctest::Approx(-1600.0));
  CHECK(far.H[0] >= 0.0);

  // y f symmetry.
  const LikelihoodDerivs a = likelihood_derivs(Vector{1.7}, Labels{1});
  const LikelihoodDerivs b = likelihood_derivs(Vector{-1.7}, Labels{-1});
  CHECK(a.loglik == doctest::Approx(b.loglik));
  CHECK(a.grad[0] == doctest::Approx(-b.grad[0]));
  CHECK(a.H[0] == doctest::Approx(b.H[0]));
  CHECK(a.loglik == doctest::Approx(log_sigmoid_ref(1.7)));
}

TEST_CASE("likelihood_derivs validates input") {
  CHECK_THROWS_AS(likelihood_derivs(Vector{0}, Labels{0}), InvalidLabel);
  CHECK_THROWS_AS(likelihood_derivs(Vector{0, 0}, Labels{1}), DimensionMismatch);
}

TEST_CASE("curvature stays in (0, 1/4]") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double f = rng.uniform(-40, 40);
    const double H = likelihood_derivs(Vector{f}, Labels{1}).H[0];
    CHECK(H > 0.0);
    CHECK(H <= 0.25);
  }
}

TEST_CASE("build_newton_system on the two-point example") {
  const GpcState s = initial_state(shared(SpdMatrix{{1, 0.5}, {0.5, 1}}), Labels{1, -1});
  const NewtonSystem sys = build_newton_system(s);
  CHECK(sys.A(0, 0) == doctest::Approx(1.25));
  CHECK(sys.A(0, 1) == doctest::Approx(0.125));
  CHECK(sys.A(1, 1) == doctest::Approx(1.25));
  CHECK(sys.b[0] == doctest::Approx(0.125));
  CHECK(sys.b[1] == doctest::Approx(-0.125));
}

TEST_CASE("build_newton_system in the saturated limit") {
  GpcState s = initial_state(shared(SpdMatrix{{1, 0.5}, {0.5, 1}}), Labels{1, -1});
  s.H = Vector{0, 0};
  s.grad_loglik = Vector{0, 0};
  s.f = Vector{3, -3};
  const NewtonSystem sys = build_newton_system(s);
  CHECK(sys.A.matrix() == Matrix::identity(2));
  CHECK(sys.b == Vector{0, 0});
}

TEST_CASE("Newton matrices have eigenvalues of at least one") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = small_problem(40, seed, 3.0);
    GpcState s = initial_state(p.K, p.y);
    for (int it = 0; it < 3; ++it) {
      const NewtonSystem sys = build_newton_system(s);
      CHECK(sym_eigen(sys.A).values.front() >= 1.0 - 1e-10);
      s = newton_update(s, cholesky_solve(cholesky_factor(sys.A), sys.b));
    }
  }
}

TEST_CASE("newton_update matches the direct Newton step") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Problem p = small_problem(15, seed);
    GpcState s = initial_state(p.K, p.y);
    for (int it = 0; it < 3; ++it) {
      const NewtonSystem sys = build_newton_system(s);
      const GpcState next = newton_update(s, cholesky_solve(cholesky_factor(sys.A), sys.b));
      // f_new = (K^{-1} + H)^{-1} (H f + grad) = (I + K H)^{-1} K (H f + grad)
      const std::size_t n = s.f.size();
      Matrix M = Matrix::identity(n);
      Vector c(n);
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = s.H[i] * s.f[i] + s.grad_loglik[i];
        for (std::size_t j = 0; j < n; ++j) M(i, j) += (*p.K)(i, j) * s.H[j];
      }
      const Vector f_ref = gauss_solve(M, matvec(*p.K, c));
      CHECK(norm2(subtract(next.f, f_ref)) <= 1e-9 * norm2(f_ref));
      s = next;
    }
  }
}

TEST_CASE("newton_update at a stationary zero state") {
  GpcState s = initial_state(shared(SpdMatrix{{1, 0.5}, {0.5, 1}}), Labels{1, -1});
  s.grad_loglik = Vector{0, 0};
  const GpcState next = newton_update(s, Vector{0, 0});
  CHECK(next.f == Vector{0, 0});
  CHECK_THROWS_AS(newton_update(s, Vector{0}), DimensionMismatch);
}

TEST_CASE("psi_objective examples") {
  const GpcState s = initial_state(shared(SpdMatrix(Matrix::identity(5))), Labels{1, 1, -1, 1, -1});
  CHECK(psi_objective(s) == doctest::Approx(-5 * std::log(2.0)));

  GpcState one = initial_state(shared(SpdMatrix{{2}}), Labels{1});
  one.a = Vector{1};
  one.f = Vector{2};
  CHECK(psi_objective(one) == doctest::Approx(log_sigmoid_ref(2.0) - 1.0));

  one.f = Vector{2.5};
  CHECK_THROWS_AS(psi_objective(one), StateInconsistent);
}

TEST_CASE("gradient of the objective matches finite differences") {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = rng.index(3, 10);
    const Matrix X = random_matrix(n, 2, rng);
    auto K = shared(rbf_kernel(X, {1.5, 1.0}, 0.1));
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? 1 : -1;
    const CholeskyFactor L = cholesky_factor(*K);
    auto psi_at = [&](const Vector& f) {
      GpcState s = initial_state(K, y);
      s.f = f;
      s.a = cholesky_solve(L, f);
      return psi_objective(s);
    };
    const Vector f = random_vector(n, rng);
    const Vector a = cholesky_solve(L, f);
    const Vector g = subtract(likelihood_derivs(f, y).grad, a);
    const double h = 1e-5;
    Vector fd(n);
    for (std::size_t i = 0; i < n; ++i) {
      Vector fp = f, fm = f;
      fp[i] += h;
      fm[i] -= h;
      fd[i] = (psi_at(fp) - psi_at(fm)) / (2 * h);
    }
    CHECK(norm2(subtract(fd, g)) <= 1e-5 * norm2(g));
  }
}

TEST_CASE("laplace_newton on the two-point toy increases the objective") {
  NewtonOptions opts;
  opts.newton_tol = 1e-10;
  const LaplaceResult r = laplace_newton(shared(SpdMatrix{{1, 0.5}, {0.5, 1}}), Labels{1, -1},
                                         SolverChoice::cholesky(), tight(), opts);
  REQUIRE(r.records.size() >= 2);
  double prev = -2 * std::log(2.0);
  for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
    CHECK(r.records[i].psi > prev);
    prev = r.records[i].psi;
  }
  CHECK(r.records.back().psi - prev < 1e-10);
  CHECK(r.state.f[0] > 0.0);
  CHECK(r.state.f[1] < 0.0);
  CHECK(r.state.f[0] == doctest::Approx(-r.state.f[1]));
}

TEST_CASE("solvers agree on the Laplace mode") {
  const Problem p = small_problem(120, 4, 4.0);
  NewtonOptions opts;
  opts.newton_tol = 1e-9;
  const LaplaceResult chol = laplace_newton(p.K, p.y, SolverChoice::cholesky(), tight(), opts);
  const LaplaceResult cg = laplace_newton(p.K, p.y, SolverChoice::cg(), tight(), opts);
  const LaplaceResult def = laplace_newton(p.K, p.y, SolverChoice::def_cg(4, 8), tight(), opts);
  const double ref = chol.records.back().psi;
  CHECK(std::abs(cg.records.back().psi - ref) <= 1e-6);
  CHECK(std::abs(def.records.back().psi - ref) <= 1e-6);
  CHECK(norm2(subtract(cg.state.f, chol.state.f)) <= 1e-6 * norm2(chol.state.f));
  CHECK(norm2(subtract(def.state.f, chol.state.f)) <= 1e-6 * norm2(chol.state.f));

  for (std::size_t i = 1; i < chol.records.size(); ++i)
    CHECK(chol.records[i].psi >= chol.records[i - 1].psi);
  for (const NewtonRecord& rec : chol.records) CHECK(rec.rel_residual <= 1e-12);
  for (const NewtonRecord& rec : def.records) CHECK(rec.rel_residual <= 1e-10);
  CHECK(def.records.front().basis_size == 0);
  CHECK(def.records.back().basis_size == 4);
}

TEST_CASE("all-positive labels give positive latents") {
  const Matrix X{{0.0}, {0.5}, {1.0}};
  NewtonOptions opts;
  opts.newton_tol = 1e-10;
  const LaplaceResult r = laplace_newton(shared(rbf_kernel(X, {3.0, 2.0})), Labels{1, 1, 1},
                                         SolverChoice::cholesky(), tight(), opts);
  for (double f : r.state.f) CHECK(f > 0.0);
}

TEST_CASE("NewtonOptions are honoured") {
  const Problem p = small_problem(30, 1);
  NewtonOptions opts;
  opts.max_newton_iters = 2;
  opts.newton_tol = 1e-12;
  const LaplaceResult r = laplace_newton(p.K, p.y, SolverChoice::cg(), tight(), opts);
  CHECK(r.records.size() == 2);

  std::size_t seen = 0;
  laplace_newton(p.K, p.y, SolverChoice::cholesky(), tight(), {},
                 [&](const GpcState& s, const NewtonRecord& rec) {
                   ++seen;
                   CHECK(rec.newton_iter == seen);
                   CHECK(s.loglik == doctest::Approx(rec.loglik));
                 });
  CHECK(seen > 0);

  CHECK(SolverChoice::cholesky().name() == "Cholesky");
  CHECK(SolverChoice::cg().name() == "CG");
  CHECK(SolverChoice::def_cg(8, 12).name() == "def-CG(k=8,l=12)");
}

TEST_CASE("laplace_newton validates its inputs") {
  CHECK_THROWS_AS(laplace_newton(shared(SpdMatrix{{1}}), Labels{1, 1}, SolverChoice::cholesky(), tight()),
                  DimensionMismatch);
  CHECK_THROWS_AS(laplace_newton(shared(SpdMatrix{{1}}), Labels{2}, SolverChoice::cholesky(), tight()),
                  InvalidLabel);
}
