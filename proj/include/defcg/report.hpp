#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace defcg {

/// One row of table.csv: a solver's state after one Newton iteration.
struct RunRecord {
  std::size_t newton_iter = 0;
  std::string solver;
  /// Tracked objective log p(y|f) - f^T a / 2.
  double logp = 0.0;
  double loglik = 0.0;
  /// |logp - logp_ref| / |logp_ref| against the Cholesky row of the same
  /// Newton iteration; absent for the reference itself or without one.
  std::optional<double> rel_error_delta;
  std::size_t solver_iterations = 0;
  double cumulative_time_s = 0.0;
};

/// One row of subset.csv.
struct SubsetRecord {
  double fraction = 0.0;
  std::size_t newton_iter = 0;
  double cpu_time = 0.0;
  double rel_logp_error = 0.0;
};

inline constexpr std::string_view kReferenceSolver = "Cholesky";

double relative_error(double value, double reference);

/// Fills rel_error_delta of every non-reference row whose Newton iteration
/// also has a reference row.
void assign_deltas(std::vector<RunRecord>& records,
                   std::string_view reference = kReferenceSolver);

/// Shortest round-trip form: 17 significant digits.
std::string format_double(double v);

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

std::string table_csv(const std::vector<RunRecord>& records);
std::string subset_csv(const std::vector<SubsetRecord>& records);

/// Writes table.csv, subset.csv and summary.json into output_dir, creating
/// it if needed. Throws std::invalid_argument on empty records, IoError on
/// write failures.
void emit_reports(const std::vector<RunRecord>& records,
                  const std::vector<SubsetRecord>& subset,
                  const nlohmann::json& summary,
                  const std::filesystem::path& output_dir);

}  // namespace defcg
