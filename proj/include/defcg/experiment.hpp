#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "defcg/data.hpp"
#include "defcg/gpc.hpp"
#include "defcg/report.hpp"

namespace defcg {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat experiment description; the JSON config file uses the same keys.
struct ExperimentConfig {
  /// "synthetic" or "mnist".
  std::string dataset = "synthetic";
  std::size_t n = 2000;
  std::size_t d = 2;
  double separation = 2.0;
  std::string mnist_images;
  std::string mnist_labels;
  int digit_a = 3;
  int digit_b = 5;
  std::size_t max_n = 2000;

  double theta = 8.0;
  /// Unset means the median pairwise distance of the data.
  std::optional<double> lengthscale;

  double tol = 1e-5;
  std::size_t max_iters = 0;
  std::size_t k = 8;
  std::size_t ell = 12;
  /// "smallest" or "largest" harmonic Ritz values.
  std::string selection = "largest";
  double newton_tol = 1.0;
  std::size_t max_newton_iters = 30;
  bool warm_start = true;

  std::vector<double> subset_fractions{0.05, 0.1, 0.25, 0.5};
  /// Newton tolerance of the subset fits, which are run to convergence.
  double subset_newton_tol = 1e-6;
  std::string output_path = "results";
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
  Selection ritz_selection() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SolverRun {
  SolverChoice choice;
  std::vector<NewtonRecord> records;
  double final_psi = 0.0;
  double final_loglik = 0.0;
  /// |loglik - loglik_cholesky| / |loglik_cholesky| at the last iteration.
  std::optional<double> final_loglik_rel_error;
};

struct SubsetRun {
  double fraction = 0.0;
  std::size_t m = 0;
  std::vector<SubsetRecord> records;
};

struct ComparisonResult {
  ExperimentConfig config;
  KernelParams kernel;
  std::size_t n = 0;
  std::vector<SolverRun> runs;
  std::vector<SubsetRun> subsets;
  std::vector<RunRecord> table;
  /// Set when a numerical failure cut the run short.
  std::exception_ptr failure;
  std::string failure_message;

  bool complete() const { return !failure; }
  std::vector<SubsetRecord> subset_rows() const;
  nlohmann::json summary() const;
};

Dataset load_dataset(const ExperimentConfig& cfg);

/// Laplace mode search with Cholesky, CG and def-CG(k, ell) on the same
/// kernel, followed by the subset baselines. Data errors propagate;
/// numerical failures are captured in `failure` with the partial results.
ComparisonResult run_comparison(const ExperimentConfig& cfg);

/// As above on an already loaded data set.
ComparisonResult run_comparison(const ExperimentConfig& cfg, const Dataset& data);

/// Writes table.csv, subset.csv and summary.json to cfg.output_path.
void emit_reports(const ComparisonResult& result);

}  // namespace defcg
