#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "copula_lab/copula.hpp"
#include "copula_lab/copula_prior.hpp"
#include "copula_lab/dvine.hpp"
#include "copula_lab/experiments.hpp"
#include "copula_lab/model.hpp"

namespace copula_lab {

enum class Subcommand {
  Diagnose,
  TauRetention,
  Coverage,
  GammaCoverage,
  ModeConvergence,
  RegressionCoverage,
  CopulaInspect
};

std::string to_string(Subcommand s);
Subcommand subcommand_from_string(const std::string& name);

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repetitions;
  std::optional<std::string> output;
  std::optional<int> threads;
  bool strict = true;
};

/// Malformed or invalid configuration; the message names the file position or field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProbeKind { Prior, Grid, Explicit };

struct DiagnoseConfig {
  std::optional<ModelSpec> model;
  std::optional<DVine> vine;
  ProbeKind probe = ProbeKind::Grid;
  std::optional<CopulaPrior> design_prior;     // ProbeKind::Prior
  std::size_t probe_count = 512;
  Eigen::VectorXd grid_lower, grid_upper;      // ProbeKind::Grid
  int grid_per_axis = 10;
  std::vector<Eigen::VectorXd> points;         // ProbeKind::Explicit
  double tolerance = 0.01;
};

struct InspectConfig {
  std::optional<CopulaSpec> c1;
  std::optional<CopulaSpec> c2;
  int grid = 101;
};

struct RunConfig {
  Subcommand command = Subcommand::TauRetention;
  std::uint64_t seed = 20240521;
  std::string output_dir = "results";
  int threads = 0;                 // 0: OpenMP default
  StudyConfig study;               // study subcommands
  DiagnoseConfig diagnose;
  InspectConfig inspect;
  nlohmann::json effective;        // fully resolved configuration, echoed to the manifest
};

/// Reads a JSON config file (or none: all defaults) and applies overrides.
/// Strict mode rejects unknown keys. Errors raise ConfigError.
RunConfig parse_config(Subcommand command, const std::optional<std::string>& path, const ConfigOverrides& overrides);

/// Same, from an already parsed document.
RunConfig parse_config_json(Subcommand command, const nlohmann::json& doc, const ConfigOverrides& overrides);

// JSON forms shared by the config file and the manifest echo.
CopulaSpec copula_from_json(const nlohmann::json& j, const std::string& field, bool strict);
nlohmann::json copula_to_json(const CopulaSpec& c);
MarginalPrior marginal_from_json(const nlohmann::json& j, const std::string& field, bool strict);
nlohmann::json marginal_to_json(const MarginalPrior& m);
CopulaPrior prior_from_json(const nlohmann::json& j, const std::string& field, bool strict);
nlohmann::json prior_to_json(const CopulaPrior& p);
ModelSpec model_from_json(const nlohmann::json& j, const std::string& field, bool strict);
nlohmann::json model_to_json(const ModelSpec& m);

/// D-vine taus implied by a copula: partial-correlation taus for elliptical families,
/// the family tau for bivariate Archimedean ones.
DVine vine_from_copula(const CopulaSpec& c);

}  // namespace copula_lab
