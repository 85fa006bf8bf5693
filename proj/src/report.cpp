#include "defcg/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "defcg/data.hpp"

namespace defcg {

double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

void assign_deltas(std::vector<RunRecord>& records, std::string_view reference) {
  std::map<std::size_t, double> ref;
  for (const RunRecord& r : records)
    if (r.solver == reference) ref[r.newton_iter] = r.logp;
  for (RunRecord& r : records) {
    r.rel_error_delta.reset();
    if (r.solver == reference) continue;
    if (auto it = ref.find(r.newton_iter); it != ref.end() && it->second != 0.0)
      r.rel_error_delta = relative_error(r.logp, it->second);
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string table_csv(const std::vector<RunRecord>& records) {
  std::string out =
      "newton_iter,solver,logp,rel_error_delta,solver_iterations,cumulative_time_s\n";
  for (const RunRecord& r : records) {
    out += std::to_string(r.newton_iter) + ',' + csv_field(r.solver) + ',' +
           format_double(r.logp) + ',' +
           (r.rel_error_delta ? format_double(*r.rel_error_delta) : "") + ',' +
           std::to_string(r.solver_iterations) + ',' +
           format_double(r.cumulative_time_s) + '\n';
  }
  return out;
}

std::string subset_csv(const std::vector<SubsetRecord>& records) {
  std::string out = "fraction,newton_iter,cpu_time,rel_logp_error\n";
  for (const SubsetRecord& r : records) {
    out += format_double(r.fraction) + ',' + std::to_string(r.newton_iter) + ',' +
           format_double(r.cpu_time) + ',' + format_double(r.rel_logp_error) + '\n';
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + p.string());
}

}  // namespace

void emit_reports(const std::vector<RunRecord>& records,
                  const std::vector<SubsetRecord>& subset,
                  const nlohmann::json& summary,
                  const std::filesystem::path& output_dir) {
  if (records.empty()) throw std::invalid_argument("emit_reports: no records");
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw IoError("cannot create " + output_dir.string() + ": " + ec.message());
  write_file(output_dir / "table.csv", table_csv(records));
  write_file(output_dir / "subset.csv", subset_csv(subset));
  write_file(output_dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace defcg
