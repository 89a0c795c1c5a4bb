// copula_lab command-line front end.
//
//   copula_lab <subcommand> [--config FILE] [--seed N] [--repetitions N]
//              [--output DIR] [--threads N] [--strict | --lenient]
//
// Exit status: 0 success, 1 run failure (FAILED marker written), 2 usage or config error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "copula_lab/config.hpp"
#include "copula_lab/diagnostics.hpp"
#include "copula_lab/errors.hpp"
#include "copula_lab/experiments.hpp"
#include "copula_lab/kernels.hpp"
#include "copula_lab/output.hpp"
#include "copula_lab/stationary.hpp"

namespace cl = copula_lab;
using nlohmann::ordered_json;

namespace {

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const cl::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const cl::DomainError*>(&e)) return "domain";
  if (dynamic_cast<const cl::ParameterError*>(&e)) return "parameter";
  if (dynamic_cast<const cl::ArgumentError*>(&e)) return "argument";
  if (dynamic_cast<const cl::ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const cl::SingularMatrixError*>(&e)) return "singular_matrix";
  return "runtime";
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::string manifest_text(const cl::RunConfig& rc, const std::vector<std::string>& files) {
  ordered_json m;
  m["command"] = cl::to_string(rc.command);
  m["seed"] = rc.seed;
  m["config"] = ordered_json::parse(rc.effective.dump());
  m["config_hash"] = cl::config_hash(rc.effective);
  m["files"] = files;
  return m.dump(2) + "\n";
}

void run_diagnose(const cl::RunConfig& rc) {
  const auto& d = rc.diagnose;
  std::vector<Eigen::VectorXd> probes;
  switch (d.probe) {
    case cl::ProbeKind::Prior: {
      auto rng = cl::make_stream(rc.seed, {0xd1a9});
      probes = cl::probes_from_prior(*d.design_prior, d.probe_count, rng);
      break;
    }
    case cl::ProbeKind::Grid: probes = cl::probes_on_grid(d.grid_lower, d.grid_upper, d.grid_per_axis); break;
    case cl::ProbeKind::Explicit: probes = d.points; break;
  }
  const auto v = cl::chronic_rejection_check(*d.vine, *d.model, probes, d.tolerance);

  ordered_json out;
  out["chronically_rejected"] = v.chronically_rejected;
  out["worst_case_gap"] = v.worst_case_gap;
  out["tolerance"] = v.tolerance;
  out["probes"] = v.probes;
  out["nearest_theta"] = vector_json(v.nearest_theta);
  ordered_json edges = ordered_json::array();
  for (std::size_t i = 0; i < d.vine->edges().size(); ++i) {
    const auto& e = d.vine->edges()[i];
    edges.push_back({{"edge", e.label()}, {"prior_tau", e.tau}, {"nearest_tau", v.nearest_tau[i] + 0.0}});
  }
  out["edges"] = edges;
  cl::write_text_file(rc.output_dir, "verdict.json", out.dump(2) + "\n");
  cl::write_text_file(rc.output_dir, "manifest.json", manifest_text(rc, {"verdict.json", "manifest.json"}));
  std::cout << (v.chronically_rejected ? "chronically rejected" : "not chronically rejected")
            << " (gap " << v.worst_case_gap << ", tolerance " << v.tolerance << ")\n";
}

void run_inspect(const cl::RunConfig& rc) {
  const auto a = cl::classify_stationary_points(*rc.inspect.c1, *rc.inspect.c2, rc.inspect.grid);
  std::vector<std::vector<std::string>> rows;
  ordered_json pts = ordered_json::array();
  for (const auto& p : a.points) {
    rows.push_back({cl::format_number(p.u(0)), cl::format_number(p.u(1)), cl::to_string(p.kind),
                    cl::format_number(p.value), cl::format_number(p.eigenvalues(0)),
                    cl::format_number(p.eigenvalues(1))});
    pts.push_back({{"u1", p.u(0)}, {"u2", p.u(1)}, {"kind", cl::to_string(p.kind)}, {"value", p.value}});
  }
  cl::write_text_file(rc.output_dir, "stationary_points.csv",
                      cl::to_csv({"u1", "u2", "kind", "log_ratio", "eig1", "eig2"}, rows));
  ordered_json summary;
  summary["degenerate"] = a.degenerate;
  summary["seeds"] = a.seeds;
  summary["skipped"] = a.skipped;
  summary["points"] = pts;
  cl::write_text_file(rc.output_dir, "stationary_points.json", summary.dump(2) + "\n");
  cl::write_text_file(rc.output_dir, "manifest.json",
                      manifest_text(rc, {"stationary_points.csv", "stationary_points.json", "manifest.json"}));
  if (a.degenerate) std::cout << "copulas agree on every seed; no stationary points reported\n";
  for (const auto& r : rows) std::cout << r[2] << " at (" << r[0] << ", " << r[1] << ")\n";
}

void run_study_command(const cl::RunConfig& rc) {
  const auto result = cl::run_study(rc.study);
  const auto files = cl::write_study_outputs(result, rc.output_dir, rc.effective);
  std::cout << cl::study_table_csv(result);
  std::cerr << result.failure_log.size() << " failed repetitions, " << result.wall_seconds << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula priors: chronic-rejection diagnostic and posterior simulation studies"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  cl::ConfigOverrides overrides;
  bool lenient = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"diagnose", "Check whether a prior dependence structure is chronically rejected"},
      {"tau-retention", "Posterior Kendall's tau under the multinomial model"},
      {"coverage", "HPD coverage against the analysis-prior correlation (multinomial)"},
      {"gamma-coverage", "HPD coverage against the analysis-prior correlation (gamma)"},
      {"mode-convergence", "Posterior-mode distances under two regression priors"},
      {"regression-coverage", "HPD coverage and area under two regression priors"},
      {"copula-inspect", "Stationary points of the log ratio of two copula densities"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", overrides.seed, "Master seed");
    sub->add_option("--repetitions", overrides.repetitions, "Repetitions per cell")->check(CLI::PositiveNumber);
    sub->add_option("--output", overrides.output, "Output directory");
    sub->add_option("--threads", overrides.threads, "Worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
    auto* strict = sub->add_flag("--strict", "Reject unknown config keys (default)");
    sub->add_flag("--lenient", lenient, "Ignore unknown config keys")->excludes(strict);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  overrides.strict = !lenient;
  const std::string name = app.get_subcommands().front()->get_name();

  if (!overrides.threads) {
    if (const char* env = std::getenv("COPULA_LAB_THREADS")) {
      try {
        overrides.threads = std::stoi(env);
      } catch (const std::exception&) {
        std::cerr << "error: COPULA_LAB_THREADS must be an integer, got '" << env << "'\n";
        return 2;
      }
    }
  }

  cl::RunConfig rc;
  try {
    rc = cl::parse_config(cl::subcommand_from_string(name), config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (rc.threads > 0) cl::set_thread_count(rc.threads);

  try {
    switch (rc.command) {
      case cl::Subcommand::Diagnose: run_diagnose(rc); break;
      case cl::Subcommand::CopulaInspect: run_inspect(rc); break;
      default: run_study_command(rc); break;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    try {
      cl::write_failure_record(rc.output_dir, name, error_type(e), e.what());
    } catch (const std::exception& io) {
      std::cerr << "could not write failure record: " << io.what() << "\n";
    }
    return 1;
  }
  return 0;
}
