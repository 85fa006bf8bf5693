#include "defcg/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <set>

#include "defcg/errors.hpp"
#include "defcg/subset.hpp"

namespace defcg {

void ExperimentConfig::validate() const {
  if (dataset == "synthetic") {
    if (n < 2) throw ConfigError("n must be at least 2");
    if (d < 1) throw ConfigError("d must be at least 1");
  } else if (dataset == "mnist") {
    if (mnist_images.empty() || mnist_labels.empty())
      throw ConfigError("mnist dataset needs mnist_images and mnist_labels");
    if (digit_a < 0 || digit_a > 9 || digit_b < 0 || digit_b > 9)
      throw ConfigError("digits must lie in 0-9");
    if (digit_a == digit_b) throw ConfigError("digits must be distinct");
    if (max_n < 2) throw ConfigError("max_n must be at least 2");
  } else {
    throw ConfigError("unknown dataset '" + dataset + "' (synthetic or mnist)");
  }
  if (!(theta > 0.0)) throw ConfigError("theta must be > 0");
  if (lengthscale && !(*lengthscale > 0.0)) throw ConfigError("lengthscale must be > 0");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be > 0");
  if (!(subset_newton_tol > 0.0)) throw ConfigError("subset_newton_tol must be > 0");
  if (max_newton_iters < 1) throw ConfigError("max_newton_iters must be >= 1");
  if (selection != "smallest" && selection != "largest")
    throw ConfigError("selection must be 'smallest' or 'largest'");
  for (double f : subset_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("subset fractions must lie in (0, 1]");
}

Selection ExperimentConfig::ritz_selection() const {
  return selection == "largest" ? Selection::Largest : Selection::Smallest;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "dataset", "n", "d", "separation", "mnist_images", "mnist_labels",
      "digit_a", "digit_b", "max_n", "theta", "lengthscale", "tol",
      "max_iters", "k", "ell", "selection", "newton_tol", "max_newton_iters",
      "subset_fractions", "subset_newton_tol", "output_path", "seed", "warm_start"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig c;
  try {
    auto get = [&j](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("dataset", c.dataset);
    get("n", c.n);
    get("d", c.d);
    get("separation", c.separation);
    get("mnist_images", c.mnist_images);
    get("mnist_labels", c.mnist_labels);
    get("digit_a", c.digit_a);
    get("digit_b", c.digit_b);
    get("max_n", c.max_n);
    get("theta", c.theta);
    if (j.contains("lengthscale") && !j.at("lengthscale").is_null())
      c.lengthscale = j.at("lengthscale").get<double>();
    get("tol", c.tol);
    get("max_iters", c.max_iters);
    get("k", c.k);
    get("ell", c.ell);
    get("selection", c.selection);
    get("newton_tol", c.newton_tol);
    get("max_newton_iters", c.max_newton_iters);
    get("warm_start", c.warm_start);
    get("subset_fractions", c.subset_fractions);
    get("subset_newton_tol", c.subset_newton_tol);
    get("output_path", c.output_path);
    get("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"dataset", dataset},
          {"n", n},
          {"d", d},
          {"separation", separation},
          {"mnist_images", mnist_images},
          {"mnist_labels", mnist_labels},
          {"digit_a", digit_a},
          {"digit_b", digit_b},
          {"max_n", max_n},
          {"theta", theta},
          {"lengthscale", lengthscale ? nlohmann::json(*lengthscale) : nlohmann::json()},
          {"tol", tol},
          {"max_iters", max_iters},
          {"k", k},
          {"ell", ell},
          {"selection", selection},
          {"newton_tol", newton_tol},
          {"max_newton_iters", max_newton_iters},
          {"warm_start", warm_start},
          {"subset_fractions", subset_fractions},
          {"subset_newton_tol", subset_newton_tol},
          {"output_path", output_path},
          {"seed", seed}};
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.dataset == "mnist")
    return load_mnist_idx(cfg.mnist_images, cfg.mnist_labels, cfg.digit_a,
                          cfg.digit_b, cfg.max_n);
  return gen_synthetic(cfg.n, cfg.d, cfg.seed, cfg.separation);
}

ComparisonResult run_comparison(const ExperimentConfig& cfg) {
  return run_comparison(cfg, load_dataset(cfg));
}

ComparisonResult run_comparison(const ExperimentConfig& cfg, const Dataset& data) {
  cfg.validate();
  ComparisonResult out;
  out.config = cfg;
  out.n = data.X.rows();
  out.kernel.signal_sd = cfg.theta;
  out.kernel.lengthscale =
      cfg.lengthscale ? *cfg.lengthscale : median_pairwise_distance(data.X);
  out.config.lengthscale = out.kernel.lengthscale;

  SolverConfig solver_cfg;
  solver_cfg.tol = cfg.tol;
  solver_cfg.max_iters = cfg.max_iters;
  solver_cfg.ell = cfg.ell;
  NewtonOptions newton;
  newton.newton_tol = cfg.newton_tol;
  newton.max_newton_iters = cfg.max_newton_iters;
  newton.warm_start = cfg.warm_start;

  try {
    auto K = std::make_shared<const SpdMatrix>(rbf_kernel(data.X, out.kernel));
    const SolverChoice choices[] = {
        SolverChoice::cholesky(), SolverChoice::cg(),
        SolverChoice::def_cg(cfg.k, cfg.ell, cfg.ritz_selection())};
    for (const SolverChoice& choice : choices) {
      SolverRun& run = out.runs.emplace_back();
      run.choice = choice;
      laplace_newton(K, data.y, choice, solver_cfg, newton,
                     [&run](const GpcState& s, const NewtonRecord& rec) {
                       run.records.push_back(rec);
                       run.final_psi = rec.psi;
                       run.final_loglik = s.loglik;
                     });
    }
  } catch (const NumericalError& e) {
    out.failure = std::current_exception();
    out.failure_message = e.what();
  }

  for (const SolverRun& run : out.runs) {
    for (const NewtonRecord& rec : run.records) {
      out.table.push_back({rec.newton_iter, run.choice.name(), rec.psi, rec.loglik,
                           std::nullopt, rec.solver_iterations, rec.cumulative_time});
    }
  }
  assign_deltas(out.table);

  const SolverRun* reference =
      !out.runs.empty() && !out.runs.front().records.empty() ? &out.runs.front() : nullptr;
  if (reference) {
    for (SolverRun& run : out.runs)
      if (!run.records.empty())
        run.final_loglik_rel_error = relative_error(run.final_loglik, reference->final_loglik);
  }
  if (out.failure || !reference) return out;

  NewtonOptions subset_newton = newton;
  subset_newton.newton_tol = cfg.subset_newton_tol;
  try {
    for (double fraction : cfg.subset_fractions) {
      const SubsetModel model =
          fit_subset(data.X, data.y, fraction, out.kernel, subset_newton, cfg.seed);
      SubsetRun& sr = out.subsets.emplace_back();
      sr.fraction = fraction;
      sr.m = model.indices_m.size();
      for (std::size_t i = 0; i < model.f_m_history.size(); ++i) {
        const double ll = evaluate_full(model, data.y, model.f_m_history[i]);
        sr.records.push_back({fraction, i + 1, model.cumulative_times[i],
                              relative_error(ll, reference->final_loglik)});
      }
    }
  } catch (const NumericalError& e) {
    out.failure = std::current_exception();
    out.failure_message = e.what();
  }
  return out;
}

std::vector<SubsetRecord> ComparisonResult::subset_rows() const {
  std::vector<SubsetRecord> rows;
  for (const SubsetRun& s : subsets) rows.insert(rows.end(), s.records.begin(), s.records.end());
  return rows;
}

nlohmann::json ComparisonResult::summary() const {
  nlohmann::json j;
  j["complete"] = complete();
  j["error"] = failure_message;
  j["config"] = config.to_json();
  j["n"] = n;
  j["kernel"] = {{"theta", kernel.signal_sd}, {"lengthscale", kernel.lengthscale}};
  j["solvers"] = nlohmann::json::array();
  for (const SolverRun& run : runs) {
    nlohmann::json s;
    std::size_t total_iters = 0;
    double total_time = 0.0;
    nlohmann::json per_iter = nlohmann::json::array();
    for (const NewtonRecord& rec : run.records) {
      total_iters += rec.solver_iterations;
      total_time = rec.cumulative_time;
      per_iter.push_back({{"newton_iter", rec.newton_iter},
                          {"logp", rec.psi},
                          {"loglik", rec.loglik},
                          {"solver_iterations", rec.solver_iterations},
                          {"basis_size", rec.basis_size},
                          {"rel_residual", rec.rel_residual},
                          {"residual_history", rec.residual_history}});
    }
    s["name"] = run.choice.name();
    s["newton_iterations"] = run.records.size();
    s["total_solver_iterations"] = total_iters;
    s["total_time_s"] = total_time;
    s["final_logp"] = run.final_psi;
    s["final_loglik"] = run.final_loglik;
    s["final_loglik_rel_error"] = run.final_loglik_rel_error
                                      ? nlohmann::json(*run.final_loglik_rel_error)
                                      : nlohmann::json();
    s["iterations"] = std::move(per_iter);
    j["solvers"].push_back(std::move(s));
  }
  j["subsets"] = nlohmann::json::array();
  for (const SubsetRun& sr : subsets) {
    j["subsets"].push_back(
        {{"fraction", sr.fraction},
         {"m", sr.m},
         {"newton_iterations", sr.records.size()},
         {"final_rel_logp_error",
          sr.records.empty() ? nlohmann::json() : nlohmann::json(sr.records.back().rel_logp_error)}});
  }
  return j;
}

void emit_reports(const ComparisonResult& result) {
  if (result.table.empty()) {
    // Nothing tabular survived the failure; keep the marked summary.
    const std::filesystem::path dir = result.config.output_path;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir / "summary.json");
    if (!out) throw IoError("cannot write " + (dir / "summary.json").string());
    out << result.summary().dump(2) << '\n';
    return;
  }
  emit_reports(result.table, result.subset_rows(), result.summary(),
               result.config.output_path);
}

}  // namespace defcg
