#include "defcg/krylov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "defcg/errors.hpp"

namespace defcg {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
}

Vector KrylovLog::image_of_direction(std::size_t j) const {
  Vector ap = subtract(r.at(j), r.at(j + 1));
  const double inv = 1.0 / alpha.at(j);
  for (double& v : ap) v *= inv;
  return ap;
}

namespace {

/// mu = (W^T A W)^{-1} (AW)^T v
Vector deflation_coefficients(const RecycleBasis& basis,
                              std::span<const double> v) {
  return cholesky_solve(basis.gram_chol, matvec_transposed(basis.AW, v));
}

void check_basis(const RecycleBasis& basis, std::size_t n) {
  if (basis.empty()) return;
  if (basis.W.rows() != n || basis.AW.rows() != n ||
      basis.AW.cols() != basis.k())
    throw DimensionMismatch("recycle basis does not match the system size");
  if (basis.gram_chol.size() != basis.k())
    throw GramNotSpd(0);
}

// Relative gap between the recurrence and true residuals above which the
// periodic check replaces the recurrence residual.
const double kDriftThreshold = std::sqrt(std::numeric_limits<double>::epsilon());

SolveResult run_cg(const SpdMatrix& A, std::span<const double> b,
                   std::span<const double> x_start, const RecycleBasis& basis,
                   const SolverConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  const std::size_t n = A.size();
  if (b.size() != n || x_start.size() != n)
    throw DimensionMismatch("CG: right-hand side or start vector size mismatch");
  check_basis(basis, n);
  const bool deflate = !basis.empty();
  const auto t_start = std::chrono::steady_clock::now();

  SolveResult out;
  Vector& x = out.x;
  SolveReport& report = out.report;
  KrylovLog& log = out.log;
  x.assign(x_start.begin(), x_start.end());

  const double bnorm = norm2(b);
  auto finish = [&](Termination t) {
    report.termination = t;
    report.converged = t == Termination::Converged;
    report.wall_time = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
    return std::move(out);
  };
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    report.residual_history.push_back(0.0);
    return finish(Termination::Converged);
  }

  Vector r = subtract(b, matvec(A, x));
  // x <- x + W (W^T A W)^{-1} W^T r, so that W^T r = 0 afterwards.
  auto coarse_correct = [&] {
    const Vector y =
        cholesky_solve(basis.gram_chol, matvec_transposed(basis.W, r));
    axpy(1.0, matvec(basis.W, y), x);
    axpy(-1.0, matvec(basis.AW, y), r);
  };
  if (deflate) coarse_correct();
  // With W spanning R^n the deflated space is {0}: the coarse correction is
  // the whole solve and is refined instead of iterating on rounding noise.
  const bool spans_all = deflate && basis.W.cols() >= n;

  Vector mu;
  auto deflated_direction = [&](Vector& p, double beta) {
    // p <- beta p + r - W mu with W^T A W mu = W^T A r
    for (std::size_t i = 0; i < n; ++i) p[i] = beta * p[i] + r[i];
    if (deflate) {
      mu = deflation_coefficients(basis, r);
      axpy(-1.0, matvec(basis.W, mu), p);
    }
  };

  double rr = dot(r, r);
  report.residual_history.push_back(std::sqrt(rr) / bnorm);
  Vector p(n, 0.0);
  deflated_direction(p, 0.0);

  const std::size_t cap = cfg.iteration_cap(n);
  bool logging = cfg.ell > 0;
  if (logging) log.r.push_back(r);
  if (observer) observer(0, x, r);

  Vector ap;
  double r_at_replacement = std::sqrt(rr);
  for (std::size_t j = 0;; ++j) {
    if (report.residual_history.back() <= cfg.tol) {
      // Confirm against the true residual before accepting.
      Vector r_true = subtract(b, matvec(A, x));
      const double rel = norm2(r_true) / bnorm;
      if (rel <= cfg.tol) return finish(Termination::Converged);
      r = std::move(r_true);
      if (deflate) coarse_correct();
      rr = dot(r, r);
      report.residual_history.back() = deflate ? std::sqrt(rr) / bnorm : rel;
      deflated_direction(p, 0.0);
      logging = false;
    }
    if (report.iterations >= cap) return finish(Termination::MaxIters);

    if (spans_all) {
      r = subtract(b, matvec(A, x));
      coarse_correct();
      rr = dot(r, r);
      ++report.iterations;
      report.residual_history.push_back(std::sqrt(rr) / bnorm);
      logging = false;
      if (observer) observer(j + 1, x, r);
      continue;
    }

    ap = matvec(A, p);
    const double d = dot(p, ap);
    if (!(d > 0.0)) throw BreakdownZeroCurvature(j);
    const double alpha = rr / d;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    ++report.iterations;

    if (logging && j < cfg.ell) {
      log.d.push_back(d);
      log.alpha.push_back(alpha);
      log.beta.push_back(beta);
      log.p.push_back(p);
      if (deflate) log.mu.push_back(mu);
      log.r.push_back(r);
    }

    if (cfg.recompute_residual_every > 0 &&
        report.iterations % cfg.recompute_residual_every == 0) {
      Vector r_true = subtract(b, matvec(A, x));
      const double rnorm = std::sqrt(rr_next);
      if (rnorm < 1e-2 * r_at_replacement &&
          norm2(subtract(r_true, r)) > kDriftThreshold * rnorm) {
        r = std::move(r_true);
        rr_next = dot(r, r);
        r_at_replacement = std::sqrt(rr_next);
        logging = false;
      }
    }

    rr = rr_next;
    report.residual_history.push_back(std::sqrt(rr) / bnorm);
    if (observer) observer(j + 1, x, r);
    deflated_direction(p, beta);
  }
}

}  // namespace

SolveResult cg_solve(const SpdMatrix& A, std::span<const double> b,
                     std::span<const double> x0, const SolverConfig& cfg,
                     const IterationObserver& observer) {
  return run_cg(A, b, x0, RecycleBasis{}, cfg, observer);
}

SolveResult deflated_cg_solve(const SpdMatrix& A, std::span<const double> b,
                              std::span<const double> x_prev,
                              const RecycleBasis& basis,
                              const SolverConfig& cfg,
                              const IterationObserver& observer) {
  return run_cg(A, b, x_prev, basis, cfg, observer);
}

Vector apply_deflation_projector(const SpdMatrix& A, const RecycleBasis& basis,
                                 std::span<const double> v) {
  if (v.size() != A.size())
    throw DimensionMismatch("apply_deflation_projector: size mismatch");
  check_basis(basis, A.size());
  Vector out(v.begin(), v.end());
  if (basis.empty()) return out;
  const Vector y =
      cholesky_solve(basis.gram_chol, matvec_transposed(basis.W, v));
  axpy(-1.0, matvec(basis.AW, y), out);
  return out;
}

RecycleBasis make_basis(const SpdMatrix& A, Matrix W) {
  const std::size_t n = A.size();
  if (W.cols() == 0) return {};
  if (W.rows() != n) throw DimensionMismatch("make_basis: W has wrong row count");
  Matrix AW(n, W.cols());
  for (std::size_t j = 0; j < W.cols(); ++j)
    AW.set_column(j, matvec(A, W.column(j)));
  CholeskyFactor chol;
  try {
    chol = cholesky_factor(symmetrized(gemm_tn(W, AW)));
  } catch (const NotPositiveDefinite& e) {
    throw GramNotSpd(e.pivot_index);
  }
  return {std::move(W), std::move(AW), std::move(chol)};
}

}  // namespace defcg
