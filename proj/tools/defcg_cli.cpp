// defcg: Laplace GP classification with Cholesky, CG and deflated CG solves.
//
//   defcg run [--config cfg.json] [overrides...]
//   defcg gen-synthetic --n 200 --d 2 --out data.csv
//   defcg validate [--seed 1]
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "defcg/data.hpp"
#include "defcg/errors.hpp"
#include "defcg/experiment.hpp"
#include "defcg/report.hpp"
#include "defcg/validate.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw defcg::ConfigError("bad fraction '" + item + "'");
    }
  }
  return out;
}

defcg::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw defcg::ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw defcg::ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return defcg::ExperimentConfig::from_json(j);
}

void print_table(const defcg::ComparisonResult& res) {
  std::printf("n = %zu, theta = %.4g, lengthscale = %.4g\n", res.n,
              res.kernel.signal_sd, res.kernel.lengthscale);
  std::printf("%-4s %-18s %16s %12s %8s %10s\n", "it", "solver", "logp", "delta",
              "iters", "t [s]");
  for (const auto& r : res.table) {
    char delta[32] = "";
    if (r.rel_error_delta) std::snprintf(delta, sizeof delta, "%.3e", *r.rel_error_delta);
    std::printf("%-4zu %-18s %16.6f %12s %8zu %10.3f\n", r.newton_iter, r.solver.c_str(),
                r.logp, delta, r.solver_iterations, r.cumulative_time_s);
  }
  for (const auto& s : res.subsets) {
    if (s.records.empty()) continue;
    std::printf("subset %.3g (m = %zu): %zu Newton iterations, rel. log p error %.3e\n",
                s.fraction, s.m, s.records.size(), s.records.back().rel_logp_error);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deflated CG with Krylov subspace recycling for Laplace GP classification"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> dataset;
  std::optional<std::size_t> n, d, k, ell, max_newton;
  std::optional<double> tol, theta, lengthscale, separation, newton_tol;
  std::optional<std::string> fractions, out, selection, images, labels;
  std::optional<std::uint64_t> seed;
  bool cold_start = false;

  auto* run = app.add_subcommand("run", "Compare Cholesky, CG and def-CG on one data set");
  run->add_option("--config", config_path, "Flat JSON experiment config");
  run->add_option("--dataset", dataset, "synthetic or mnist");
  run->add_option("--n", n, "Synthetic data set size");
  run->add_option("--d", d, "Synthetic feature dimension");
  run->add_option("--separation", separation, "Synthetic cluster separation");
  run->add_option("--mnist-images", images, "MNIST IDX image file");
  run->add_option("--mnist-labels", labels, "MNIST IDX label file");
  run->add_option("--k", k, "Recycled basis size");
  run->add_option("--ell", ell, "Logged CG iterations per solve");
  run->add_option("--selection", selection, "smallest or largest harmonic Ritz values");
  run->add_option("--tol", tol, "Relative residual tolerance");
  run->add_option("--newton-tol", newton_tol, "Stop when the objective gains less");
  run->add_option("--max-newton", max_newton, "Newton iteration cap");
  run->add_option("--theta", theta, "Kernel signal standard deviation");
  run->add_option("--lengthscale", lengthscale, "Kernel lengthscale");
  run->add_option("--fractions", fractions, "Comma-separated subset fractions");
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--out", out, "Output directory");
  run->add_flag("--cold-start", cold_start, "Start every iterative solve at zero");

  std::size_t gen_n = 200, gen_d = 2;
  std::uint64_t gen_seed = 0;
  double gen_sep = 2.0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic two-cluster data set as CSV");
  gen->add_option("--n", gen_n, "Number of points");
  gen->add_option("--d", gen_d, "Feature dimension");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--separation", gen_sep, "Distance between cluster centres");
  gen->add_option("--out", gen_out, "Output CSV (stdout when omitted)");

  std::uint64_t val_seed = 1;
  auto* val = app.add_subcommand("validate", "Check solver and model invariants on small instances");
  val->add_option("--seed", val_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      defcg::ExperimentConfig cfg = load_config(config_path);
      if (dataset) cfg.dataset = *dataset;
      if (n) cfg.n = *n;
      if (d) cfg.d = *d;
      if (separation) cfg.separation = *separation;
      if (images) cfg.mnist_images = *images;
      if (labels) cfg.mnist_labels = *labels;
      if (k) cfg.k = *k;
      if (ell) cfg.ell = *ell;
      if (selection) cfg.selection = *selection;
      if (tol) cfg.tol = *tol;
      if (newton_tol) cfg.newton_tol = *newton_tol;
      if (max_newton) cfg.max_newton_iters = *max_newton;
      if (theta) cfg.theta = *theta;
      if (lengthscale) cfg.lengthscale = *lengthscale;
      if (fractions) cfg.subset_fractions = parse_fractions(*fractions);
      if (seed) cfg.seed = *seed;
      if (out) cfg.output_path = *out;
      if (cold_start) cfg.warm_start = false;
      cfg.validate();

      const defcg::ComparisonResult res = defcg::run_comparison(cfg);
      defcg::emit_reports(res);
      print_table(res);
      if (!res.complete()) std::rethrow_exception(res.failure);
      std::printf("reports written to %s\n", cfg.output_path.c_str());
      return 0;
    }
    if (*gen) {
      const defcg::Dataset ds = defcg::gen_synthetic(gen_n, gen_d, gen_seed, gen_sep);
      std::ofstream file;
      if (!gen_out.empty()) {
        file.open(gen_out);
        if (!file) throw defcg::IoError("cannot open " + gen_out);
      }
      std::ostream& os = gen_out.empty() ? std::cout : file;
      os << "label";
      for (std::size_t c = 0; c < gen_d; ++c) os << ",x" << c;
      os << '\n';
      for (std::size_t i = 0; i < ds.X.rows(); ++i) {
        os << ds.y[i];
        for (double v : ds.X.row(i)) os << ',' << defcg::format_double(v);
        os << '\n';
      }
      return 0;
    }
    if (*val) return defcg::run_validation(val_seed, std::cout) ? 0 : kExitNumerical;
  } catch (const defcg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const defcg::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const defcg::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitData;
  } catch (const defcg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
