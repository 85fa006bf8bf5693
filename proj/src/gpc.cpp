#include "defcg/gpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "defcg/cholesky.hpp"
#include "defcg/errors.hpp"

namespace defcg {

void KernelParams::validate() const {
  if (!(signal_sd > 0.0) || !(lengthscale > 0.0))
    throw std::invalid_argument("kernel signal_sd and lengthscale must be > 0");
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// log sigma(z) without overflow.
double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// sigma(z)(1 - sigma(z)) = e^{-|z|} / (1 + e^{-|z|})^2
double sigmoid_curvature(double z) {
  const double e = std::exp(-std::abs(z));
  return e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

SpdMatrix rbf_kernel(const Matrix& X, const KernelParams& params,
                     std::optional<double> jitter) {
  params.validate();
  const double amp = params.signal_sd * params.signal_sd;
  const double nugget = jitter.value_or(1e-8 * amp);
  if (nugget < 0.0) throw std::invalid_argument("rbf_kernel: jitter must be >= 0");
  const double scale = -0.5 / (params.lengthscale * params.lengthscale);
  const std::size_t n = X.rows();
  Matrix K(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    K(i, i) = amp + nugget;
    for (std::size_t j = 0; j < i; ++j) {
      K(i, j) = K(j, i) = amp * std::exp(scale * squared_distance(X.row(i), X.row(j)));
    }
  }
  return SpdMatrix(std::move(K));
}

Matrix rbf_cross_kernel(const Matrix& X1, const Matrix& X2,
                        const KernelParams& params) {
  params.validate();
  if (X1.cols() != X2.cols())
    throw DimensionMismatch("rbf_cross_kernel: feature dimensions differ");
  const double amp = params.signal_sd * params.signal_sd;
  const double scale = -0.5 / (params.lengthscale * params.lengthscale);
  Matrix K(X1.rows(), X2.rows());
  for (std::size_t i = 0; i < X1.rows(); ++i)
    for (std::size_t j = 0; j < X2.rows(); ++j)
      K(i, j) = amp * std::exp(scale * squared_distance(X1.row(i), X2.row(j)));
  return K;
}

double median_pairwise_distance(const Matrix& X, std::size_t max_points) {
  const std::size_t n = std::min(X.rows(), max_points);
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      dist.push_back(std::sqrt(squared_distance(X.row(i), X.row(j))));
  if (dist.empty()) return 1.0;
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  return *mid;
}

LikelihoodDerivs likelihood_derivs(std::span<const double> f, const Labels& y) {
  if (f.size() != y.size())
    throw DimensionMismatch("likelihood_derivs: f and y differ in length");
  LikelihoodDerivs out{0.0, Vector(f.size()), Vector(f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (y[i] != 1 && y[i] != -1)
      throw InvalidLabel("label at index " + std::to_string(i) +
                         " is not -1 or +1");
    out.loglik += log_sigmoid(y[i] * f[i]);
    out.grad[i] = (y[i] + 1) / 2 - sigmoid(f[i]);
    out.H[i] = sigmoid_curvature(f[i]);
  }
  return out;
}

namespace {

void refresh_derivs(GpcState& s) {
  LikelihoodDerivs d = likelihood_derivs(s.f, s.y);
  s.loglik = d.loglik;
  s.grad_loglik = std::move(d.grad);
  s.H = std::move(d.H);
}

}  // namespace

GpcState initial_state(std::shared_ptr<const SpdMatrix> K, Labels y) {
  if (!K) throw std::invalid_argument("initial_state: null kernel");
  if (K->size() != y.size())
    throw DimensionMismatch("initial_state: kernel and labels differ in size");
  GpcState s;
  s.f.assign(y.size(), 0.0);
  s.a.assign(y.size(), 0.0);
  s.y = std::move(y);
  s.K = std::move(K);
  refresh_derivs(s);
  return s;
}

NewtonSystem build_newton_system(const GpcState& state) {
  const SpdMatrix& K = *state.K;
  const std::size_t n = K.size();
  Vector s(n);
  Vector c(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sqrt(state.H[i]);
    c[i] = state.H[i] * state.f[i] + state.grad_loglik[i];
  }
  Matrix A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto krow = K.matrix().row(i);
    const auto arow = A.row(i);
    for (std::size_t j = 0; j < n; ++j) arow[j] = s[i] * krow[j] * s[j];
    arow[i] += 1.0;
  }
  Vector b = matvec(K, c);
  for (std::size_t i = 0; i < n; ++i) b[i] *= s[i];
  return {SpdMatrix(std::move(A)), std::move(b), std::move(s)};
}

GpcState newton_update(const GpcState& state, std::span<const double> x) {
  const std::size_t n = state.f.size();
  if (x.size() != n) throw DimensionMismatch("newton_update: size mismatch");
  GpcState next;
  next.y = state.y;
  next.K = state.K;
  next.a.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    next.a[i] = state.H[i] * state.f[i] + state.grad_loglik[i] -
                std::sqrt(state.H[i]) * x[i];
  next.f = matvec(*state.K, next.a);
  refresh_derivs(next);
  return next;
}

double psi_objective(const GpcState& state) {
  const Vector ka = matvec(*state.K, state.a);
  const double fnorm = norm2(state.f);
  if (norm2(subtract(state.f, ka)) > 1e-8 * fnorm)
    throw StateInconsistent("psi_objective: f != K a");
  const double ll = likelihood_derivs(state.f, state.y).loglik;
  return ll - 0.5 * dot(state.f, state.a);
}

std::string SolverChoice::name() const {
  switch (kind) {
    case SolverKind::Cholesky: return "Cholesky";
    case SolverKind::CG: return "CG";
    case SolverKind::DefCG:
      return "def-CG(k=" + std::to_string(k) + ",l=" + std::to_string(ell) + ")";
  }
  return "unknown";
}

LaplaceResult laplace_newton(std::shared_ptr<const SpdMatrix> K, const Labels& y,
                             const SolverChoice& solver, const SolverConfig& cfg,
                             const NewtonOptions& opts,
                             const NewtonObserver& observer) {
  cfg.validate();
  LaplaceResult result{initial_state(std::move(K), y), {}};
  GpcState& state = result.state;

  SequenceState seq;
  seq.cfg = cfg;
  seq.k = solver.kind == SolverKind::DefCG ? solver.k : 0;
  seq.selection = solver.selection;
  if (solver.kind == SolverKind::DefCG) seq.cfg.ell = solver.ell;

  double psi_prev = psi_objective(state);
  double cumulative = 0.0;
  for (std::size_t it = 1; it <= opts.max_newton_iters; ++it) {
    const NewtonSystem sys = build_newton_system(state);
    NewtonRecord rec;
    rec.newton_iter = it;

    Vector x;
    const auto t0 = std::chrono::steady_clock::now();
    if (solver.kind == SolverKind::Cholesky) {
      x = cholesky_solve(cholesky_factor(sys.A), sys.b);
      rec.solve_time = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      const double bnorm = norm2(sys.b);
      rec.rel_residual =
          bnorm > 0.0 ? norm2(subtract(sys.b, matvec(sys.A, x))) / bnorm : 0.0;
    } else {
      if (!opts.warm_start) seq.x_last.assign(sys.b.size(), 0.0);
      x = solve_next(seq, sys.A, sys.b);
      const SequenceStep& step = seq.history.back();
      rec.solve_time = step.report.wall_time + step.recycle_time;
      rec.solver_iterations = step.report.iterations;
      rec.rel_residual = step.report.final_residual();
      rec.residual_history = step.report.residual_history;
      rec.basis_size = step.basis_size;
    }
    cumulative += rec.solve_time;
    rec.cumulative_time = cumulative;

    state = newton_update(state, x);
    rec.psi = psi_objective(state);
    rec.loglik = state.loglik;
    const double gain = rec.psi - psi_prev;
    if (gain < -opts.max_decrease)
      throw NoProgress("Newton objective decreased by " + std::to_string(-gain) +
                       " at iteration " + std::to_string(it));
    result.records.push_back(rec);
    if (observer) observer(state, rec);
    if (gain < opts.newton_tol) break;
    psi_prev = rec.psi;
  }
  return result;
}

}  // namespace defcg
