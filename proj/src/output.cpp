#include "copula_lab/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "copula_lab/errors.hpp"

namespace copula_lab {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
    os << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string config_hash(const nlohmann::json& effective_config) {
  nlohmann::json j = effective_config;
  if (j.is_object()) j.erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string num(double x) { return format_number(x); }
std::string num(std::int64_t x) { return std::to_string(x); }
std::string num(std::size_t x) { return std::to_string(x); }

}  // namespace

std::string study_table_csv(const StudyResult& result) {
  std::vector<std::vector<std::string>> rows;
  switch (result.study) {
    case StudyKind::TauRetention:
      for (const auto& c : result.cells) rows.push_back({num(c.n), num(c.min), num(c.estimate), num(c.max)});
      return to_csv({"n", "min", "median", "max"}, rows);
    case StudyKind::MultinomialCoverage:
    case StudyKind::GammaCoverage:
      for (const auto& c : result.cells)
        rows.push_back({num(c.rho), num(c.n), num(c.estimate), num(c.se), num(c.median_area), num(c.repetitions),
                        num(c.failures)});
      return to_csv({"rho", "n", "coverage", "se", "median_area", "repetitions", "failures"}, rows);
    case StudyKind::ModeConvergence:
      for (const auto& c : result.cells)
        rows.push_back({std::to_string(c.case_id), num(c.n), num(c.estimate), num(c.se), num(c.mean_abs_diff),
                        num(c.mean_abs_diff_se), num(c.median_abs_diff), num(c.repetitions), num(c.failures)});
      return to_csv({"case", "n", "prob_d2_le_d1", "se", "mean_abs_diff", "mean_abs_diff_se", "median_abs_diff",
                     "repetitions", "failures"},
                    rows);
    case StudyKind::RegressionCoverage:
      for (const auto& c : result.cells)
        rows.push_back({std::to_string(c.case_id), c.prior, num(c.n), num(c.estimate), num(c.median_area), num(c.se),
                        num(c.repetitions), num(c.failures)});
      return to_csv({"case", "prior", "n", "coverage", "median_area", "se", "repetitions", "failures"}, rows);
  }
  throw ArgumentError("study_table_csv: unknown study");
}

std::string study_long_csv(const StudyResult& result) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : result.cells) {
    switch (result.study) {
      case StudyKind::TauRetention:
        rows.push_back({num(c.n), num(c.estimate), "median_tau", num(c.se), num(c.repetitions)});
        break;
      case StudyKind::MultinomialCoverage:
      case StudyKind::GammaCoverage:
        rows.push_back({num(c.rho), num(c.estimate), "n=" + num(c.n), num(c.se), num(c.repetitions)});
        break;
      case StudyKind::ModeConvergence:
        rows.push_back({num(c.n), num(c.estimate), "case=" + std::to_string(c.case_id) + ";prob_d2_le_d1", num(c.se),
                        num(c.repetitions)});
        rows.push_back({num(c.n), num(c.mean_abs_diff), "case=" + std::to_string(c.case_id) + ";mean_abs_diff",
                        num(c.mean_abs_diff_se), num(c.repetitions)});
        break;
      case StudyKind::RegressionCoverage:
        rows.push_back({num(c.n), num(c.estimate), "case=" + std::to_string(c.case_id) + ";prior=" + c.prior, num(c.se),
                        num(c.repetitions)});
        break;
    }
  }
  return to_csv({"x", "y", "series", "se", "repetitions"}, rows);
}

void write_text_file(const std::string& dir, const std::string& name, const std::string& contents) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << contents;
}

std::vector<std::string> write_study_outputs(const StudyResult& result, const std::string& dir,
                                             const nlohmann::json& effective_config) {
  const std::string table = study_table_csv(result);
  const std::string figure = study_long_csv(result);
  std::string log;
  for (const auto& f : result.failure_log) log += f + "\n";
  write_text_file(dir, "table.csv", table);
  write_text_file(dir, "figure.csv", figure);
  write_text_file(dir, "failures.log", log);

  nlohmann::json manifest;
  manifest["study"] = to_string(result.study);
  manifest["seed"] = result.config.seed;
  manifest["repetitions"] = result.config.repetitions;
  manifest["config"] = effective_config;
  manifest["config_hash"] = config_hash(effective_config);
  manifest["wall_seconds"] = result.wall_seconds;
  std::size_t failures = 0;
  for (const auto& c : result.cells) failures += c.failures;
  manifest["failed_repetitions"] = failures;
  manifest["files"] = {"table.csv", "figure.csv", "failures.log"};
  write_text_file(dir, "manifest.json", manifest.dump(2) + "\n");
  return {"table.csv", "figure.csv", "failures.log", "manifest.json"};
}

void write_failure_record(const std::string& dir, const std::string& command, const std::string& error_type,
                          const std::string& message) {
  nlohmann::json rec;
  rec["status"] = "FAILED";
  rec["command"] = command;
  rec["error_type"] = error_type;
  rec["message"] = message;
  write_text_file(dir, "FAILED", "FAILED\n");
  write_text_file(dir, "error.json", rec.dump(2) + "\n");
}

}  // namespace copula_lab
