#include "copula_lab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "copula_lab/diagnostics.hpp"
#include "copula_lab/errors.hpp"

namespace copula_lab {

using nlohmann::json;

namespace {

// Typed access to one JSON object that remembers which keys were read.
class Section {
 public:
  Section(const json& j, std::string path, bool strict) : j_(j), path_(std::move(path)), strict_(strict) {
    if (!j_.is_object()) throw ConfigError(label() + ": expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key) + ": required key is missing");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) return fallback;
    return as<T>(j_.at(key), field(key));
  }

  template <typename T>
  T require(const std::string& key) {
    return as<T>(raw(key), field(key));
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (!strict_) return;
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError(field(key) + ": unknown key");
  }

  template <typename T>
  static T as(const json& v, const std::string& where) {
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where + ": wrong type (" + std::string(e.what()) + ")");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  bool strict_;
  std::set<std::string> used_;
};

double require_open_unit(double v, const std::string& where, double lo = -1.0) {
  if (!(v > lo && v < 1.0)) {
    std::ostringstream os;
    os << where << ": must lie in (" << lo << ",1), got " << v;
    throw ConfigError(os.str());
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  const auto rows = Section::as<std::vector<std::vector<double>>>(j, where);
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ConfigError(where + ": matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  const auto v = Section::as<std::vector<double>>(j, where);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

template <typename F>
auto wrap(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void read_study(Section& s, StudyConfig& st) {
  st.repetitions = s.get<std::size_t>("repetitions", st.repetitions);
  st.sample_sizes = s.get<std::vector<std::int64_t>>("sample_sizes", st.sample_sizes);
  if (s.has("rho_grid")) {
    st.rho_grid = s.require<std::vector<double>>("rho_grid");
    for (std::size_t i = 0; i < st.rho_grid.size(); ++i)
      require_open_unit(st.rho_grid[i], s.field("rho_grid[" + std::to_string(i) + "]"));
  }
  if (s.has("nature_rho")) st.nature_rho = require_open_unit(s.require<double>("nature_rho"), s.field("nature_rho"));
  st.cases = s.get<std::vector<int>>("cases", st.cases);
  if (s.has("priors")) {
    st.priors.clear();
    const auto names = s.require<std::vector<std::string>>("priors");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == "independence") st.priors.push_back(RegressionPrior::Independence);
      else if (names[i] == "t") st.priors.push_back(RegressionPrior::StudentT);
      else throw ConfigError(s.field("priors[" + std::to_string(i) + "]") + ": expected 'independence' or 't'");
    }
  }
  st.noise_variance = s.get<double>("noise_variance", st.noise_variance);
  st.t_nu = s.get<double>("t_nu", st.t_nu);
  st.mode_tolerance = s.get<double>("mode_tolerance", st.mode_tolerance);
  if (s.has("sir")) {
    Section sir(s.raw("sir"), s.field("sir"), true);
    st.sir.proposal_size = sir.get<std::size_t>("proposal_size", st.sir.proposal_size);
    st.sir.resample_size = sir.get<std::size_t>("resample_size", st.sir.resample_size);
    const auto scheme = sir.get<std::string>("resampling", "multinomial");
    if (scheme == "multinomial") st.sir.resampling = Resampling::Multinomial;
    else if (scheme == "systematic") st.sir.resampling = Resampling::Systematic;
    else throw ConfigError(sir.field("resampling") + ": expected 'multinomial' or 'systematic'");
    sir.finish();
  }
  if (s.has("kde")) {
    Section kde(s.raw("kde"), s.field("kde"), true);
    st.kde_grid = kde.get<int>("grid", st.kde_grid);
    kde.finish();
  }
  if (s.has("hpd")) {
    Section hpd(s.raw("hpd"), s.field("hpd"), true);
    st.hpd_level = hpd.get<double>("level", st.hpd_level);
    st.qmc_points = hpd.get<int>("qmc_points", st.qmc_points);
    st.qmc_replicates = hpd.get<int>("qmc_replicates", st.qmc_replicates);
    hpd.finish();
  }
}

json study_to_json(const StudyConfig& st) {
  json j;
  j["study"] = to_string(st.study);
  j["seed"] = st.seed;
  j["repetitions"] = st.repetitions;
  j["sample_sizes"] = st.sample_sizes;
  j["output"] = st.output_dir;
  switch (st.study) {
    case StudyKind::MultinomialCoverage:
    case StudyKind::GammaCoverage:
      j["rho_grid"] = st.rho_grid;
      [[fallthrough]];
    case StudyKind::TauRetention:
      j["nature_rho"] = st.nature_rho;
      break;
    case StudyKind::RegressionCoverage: {
      std::vector<std::string> names;
      for (auto p : st.priors) names.push_back(to_string(p));
      j["priors"] = names;
      [[fallthrough]];
    }
    case StudyKind::ModeConvergence:
      j["cases"] = st.cases;
      j["noise_variance"] = st.noise_variance;
      j["t_nu"] = st.t_nu;
      j["mode_tolerance"] = st.mode_tolerance;
      break;
  }
  if (st.study != StudyKind::ModeConvergence) {
    j["sir"] = {{"proposal_size", st.sir.proposal_size},
                {"resample_size", st.sir.resample_size},
                {"resampling", st.sir.resampling == Resampling::Multinomial ? "multinomial" : "systematic"}};
  }
  if (st.study != StudyKind::ModeConvergence && st.study != StudyKind::TauRetention) {
    j["kde"] = {{"grid", st.kde_grid}};
    j["hpd"] = {{"level", st.hpd_level}, {"qmc_points", st.qmc_points}, {"qmc_replicates", st.qmc_replicates}};
  }
  return j;
}

// Default probe box for the model interior.
void default_grid(const ModelSpec& m, DiagnoseConfig& d) {
  const int k = m.dim();
  d.grid_lower.resize(k);
  d.grid_upper.resize(k);
  switch (m.kind) {
    case ModelKind::MultinomialConditional:
      d.grid_lower.setConstant(0.05);
      d.grid_upper.setConstant(0.95);
      break;
    case ModelKind::NormalMeanVar:
      d.grid_lower << -10.0, 0.1;
      d.grid_upper << 10.0, 10.0;
      break;
    case ModelKind::GammaShapeRate:
      d.grid_lower << 0.1, 0.1;
      d.grid_upper << 50.0, 50.0;
      break;
    case ModelKind::LinRegKnownVar:
      d.grid_lower.setConstant(-10.0);
      d.grid_upper.setConstant(10.0);
      break;
    case ModelKind::ExpPairCopula:
      d.grid_lower << 0.5, 0.5;
      d.grid_upper << 2.0, 2.0;
      break;
  }
}

void read_diagnose(Section& s, DiagnoseConfig& d, bool strict) {
  d.model = model_from_json(s.raw("model"), s.field("model"), strict);
  const int k = d.model->dim();
  const bool has_taus = s.has("vine_taus");
  const bool has_copula = s.has("prior_copula");
  if (has_taus == has_copula) throw ConfigError(s.field("vine_taus") + ": give exactly one of vine_taus or prior_copula");
  if (has_taus) {
    const auto taus = s.require<std::vector<double>>("vine_taus");
    for (std::size_t i = 0; i < taus.size(); ++i) require_open_unit(taus[i], s.field("vine_taus[" + std::to_string(i) + "]"));
    d.vine = wrap(s.field("vine_taus"), [&] { return DVine(k, taus); });
  } else {
    const CopulaSpec c = copula_from_json(s.raw("prior_copula"), s.field("prior_copula"), strict);
    if (c.dim() != k) throw ConfigError(s.field("prior_copula") + ": dimension does not match the model");
    d.vine = vine_from_copula(c);
  }
  d.tolerance = s.get<double>("tolerance", d.tolerance);
  if (!(d.tolerance > 0.0)) throw ConfigError(s.field("tolerance") + ": must be positive");

  default_grid(*d.model, d);
  if (!s.has("probe")) return;
  Section p(s.raw("probe"), s.field("probe"), strict);
  const auto kind = p.require<std::string>("kind");
  if (kind == "prior") {
    d.probe = ProbeKind::Prior;
    d.design_prior = prior_from_json(p.raw("design_prior"), p.field("design_prior"), strict);
    if (d.design_prior->dim() != k) throw ConfigError(p.field("design_prior") + ": dimension does not match the model");
    d.probe_count = p.get<std::size_t>("count", d.probe_count);
    if (d.probe_count < 1) throw ConfigError(p.field("count") + ": must be >= 1");
  } else if (kind == "grid") {
    d.probe = ProbeKind::Grid;
    if (p.has("lower")) d.grid_lower = vector_from_json(p.raw("lower"), p.field("lower"));
    if (p.has("upper")) d.grid_upper = vector_from_json(p.raw("upper"), p.field("upper"));
    d.grid_per_axis = p.get<int>("per_axis", d.grid_per_axis);
    if (d.grid_lower.size() != k || d.grid_upper.size() != k) throw ConfigError(p.field("lower") + ": wrong dimension");
    if (d.grid_per_axis < 1) throw ConfigError(p.field("per_axis") + ": must be >= 1");
  } else if (kind == "explicit") {
    d.probe = ProbeKind::Explicit;
    const auto pts = p.require<std::vector<std::vector<double>>>("points");
    if (pts.empty()) throw ConfigError(p.field("points") + ": must not be empty");
    for (const auto& q : pts) {
      if (static_cast<int>(q.size()) != k) throw ConfigError(p.field("points") + ": wrong dimension");
      d.points.push_back(Eigen::Map<const Eigen::VectorXd>(q.data(), k));
    }
  } else {
    throw ConfigError(p.field("kind") + ": expected 'prior', 'grid' or 'explicit'");
  }
  p.finish();
}

json diagnose_to_json(const DiagnoseConfig& d) {
  json j;
  j["model"] = model_to_json(*d.model);
  std::vector<double> taus;
  for (const auto& e : d.vine->edges()) taus.push_back(e.tau);
  j["vine_taus"] = taus;
  j["tolerance"] = d.tolerance;
  json p;
  switch (d.probe) {
    case ProbeKind::Prior:
      p["kind"] = "prior";
      p["design_prior"] = prior_to_json(*d.design_prior);
      p["count"] = d.probe_count;
      break;
    case ProbeKind::Grid:
      p["kind"] = "grid";
      p["lower"] = vector_to_json(d.grid_lower);
      p["upper"] = vector_to_json(d.grid_upper);
      p["per_axis"] = d.grid_per_axis;
      break;
    case ProbeKind::Explicit: {
      p["kind"] = "explicit";
      json pts = json::array();
      for (const auto& q : d.points) pts.push_back(vector_to_json(q));
      p["points"] = pts;
      break;
    }
  }
  j["probe"] = p;
  return j;
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Diagnose: return "diagnose";
    case Subcommand::TauRetention: return "tau-retention";
    case Subcommand::Coverage: return "coverage";
    case Subcommand::GammaCoverage: return "gamma-coverage";
    case Subcommand::ModeConvergence: return "mode-convergence";
    case Subcommand::RegressionCoverage: return "regression-coverage";
    case Subcommand::CopulaInspect: return "copula-inspect";
  }
  return "unknown";
}

Subcommand subcommand_from_string(const std::string& name) {
  for (auto s : {Subcommand::Diagnose, Subcommand::TauRetention, Subcommand::Coverage, Subcommand::GammaCoverage,
                 Subcommand::ModeConvergence, Subcommand::RegressionCoverage, Subcommand::CopulaInspect})
    if (to_string(s) == name) return s;
  throw ArgumentError("unknown subcommand '" + name + "'");
}

CopulaSpec copula_from_json(const json& j, const std::string& field, bool strict) {
  Section s(j, field, strict);
  const auto family = s.require<std::string>("family");
  CopulaFamily fam;
  try {
    fam = copula_family_from_string(family);
  } catch (const std::exception& e) {
    throw ConfigError(s.field("family") + ": " + e.what());
  }
  auto correlation = [&]() -> Eigen::MatrixXd {
    if (s.has("correlation")) return matrix_from_json(s.raw("correlation"), s.field("correlation"));
    const double rho = require_open_unit(s.get<double>("rho", 0.0), s.field("rho"));
    Eigen::MatrixXd r(2, 2);
    r << 1.0, rho, rho, 1.0;
    return r;
  };
  CopulaSpec c = [&] {
    switch (fam) {
      case CopulaFamily::Independence: {
        const int dim = s.get<int>("dim", 2);
        return wrap(s.field("dim"), [&] { return CopulaSpec::independence(dim); });
      }
      case CopulaFamily::Gaussian: {
        const Eigen::MatrixXd r = correlation();
        return wrap(s.field("correlation"), [&] { return CopulaSpec::gaussian(r); });
      }
      case CopulaFamily::StudentT: {
        const Eigen::MatrixXd r = correlation();
        const double nu = s.get<double>("nu", 4.0);
        if (!(nu > 0.0)) throw ConfigError(s.field("nu") + ": must be positive");
        return wrap(s.field("correlation"), [&] { return CopulaSpec::student_t(r, nu); });
      }
      case CopulaFamily::Clayton: {
        const double t = s.require<double>("theta");
        return wrap(s.field("theta"), [&] { return CopulaSpec::clayton(t); });
      }
      case CopulaFamily::Gumbel: {
        const double t = s.require<double>("theta");
        return wrap(s.field("theta"), [&] { return CopulaSpec::gumbel(t); });
      }
      case CopulaFamily::Frank: {
        const double t = s.require<double>("theta");
        return wrap(s.field("theta"), [&] { return CopulaSpec::frank(t); });
      }
    }
    throw ConfigError(s.field("family") + ": unsupported");
  }();
  s.finish();
  return c;
}

json copula_to_json(const CopulaSpec& c) {
  json j;
  j["family"] = to_string(c.family());
  switch (c.family()) {
    case CopulaFamily::Independence: j["dim"] = c.dim(); break;
    case CopulaFamily::StudentT: j["nu"] = c.nu(); [[fallthrough]];
    case CopulaFamily::Gaussian: j["correlation"] = matrix_to_json(c.correlation()); break;
    default: j["theta"] = c.parameter(); break;
  }
  return j;
}

MarginalPrior marginal_from_json(const json& j, const std::string& field, bool strict) {
  Section s(j, field, strict);
  const auto family = s.require<std::string>("family");
  MarginalPrior m = [&] {
    if (family == "beta") {
      const double a = s.require<double>("a"), b = s.require<double>("b");
      return wrap(field, [&] { return MarginalPrior::beta(a, b); });
    }
    if (family == "gamma") {
      const double shape = s.require<double>("shape"), rate = s.require<double>("rate");
      return wrap(field, [&] { return MarginalPrior::gamma(shape, rate); });
    }
    if (family == "normal") {
      const double mean = s.require<double>("mean"), var = s.require<double>("variance");
      return wrap(field, [&] { return MarginalPrior::normal(mean, var); });
    }
    throw ConfigError(s.field("family") + ": expected 'beta', 'gamma' or 'normal'");
  }();
  s.finish();
  return m;
}

json marginal_to_json(const MarginalPrior& m) {
  switch (m.family()) {
    case MarginalFamily::Beta: return {{"family", "beta"}, {"a", m.first()}, {"b", m.second()}};
    case MarginalFamily::Gamma: return {{"family", "gamma"}, {"shape", m.first()}, {"rate", m.second()}};
    case MarginalFamily::Normal: return {{"family", "normal"}, {"mean", m.first()}, {"variance", m.second()}};
  }
  return {};
}

CopulaPrior prior_from_json(const json& j, const std::string& field, bool strict) {
  Section s(j, field, strict);
  const json& ms = s.raw("marginals");
  if (!ms.is_array() || ms.empty()) throw ConfigError(s.field("marginals") + ": expected a non-empty array");
  std::vector<MarginalPrior> marginals;
  for (std::size_t i = 0; i < ms.size(); ++i)
    marginals.push_back(marginal_from_json(ms[i], s.field("marginals[" + std::to_string(i) + "]"), strict));
  const CopulaSpec c = copula_from_json(s.raw("copula"), s.field("copula"), strict);
  s.finish();
  return wrap(field, [&] { return CopulaPrior(marginals, c); });
}

json prior_to_json(const CopulaPrior& p) {
  json ms = json::array();
  for (const auto& m : p.marginals()) ms.push_back(marginal_to_json(m));
  return {{"marginals", ms}, {"copula", copula_to_json(p.copula())}};
}

ModelSpec model_from_json(const json& j, const std::string& field, bool strict) {
  Section s(j, field, strict);
  const auto kind = s.require<std::string>("kind");
  ModelSpec m = [&] {
    if (kind == "multinomial") {
      const int w = s.get<int>("categories", 3);
      return wrap(s.field("categories"), [&] { return ModelSpec::multinomial(w); });
    }
    if (kind == "normal") return ModelSpec::normal_mean_var();
    if (kind == "gamma") return ModelSpec::gamma_shape_rate();
    if (kind == "regression") {
      const double s2 = s.get<double>("noise_variance", 5.0);
      const int p = s.get<int>("covariates", 2);
      return wrap(field, [&] { return ModelSpec::linreg_known_var(s2, p); });
    }
    if (kind == "exp_pair") return ModelSpec::exp_pair(copula_from_json(s.raw("copula"), s.field("copula"), strict));
    throw ConfigError(s.field("kind") + ": expected multinomial, normal, gamma, regression or exp_pair");
  }();
  s.finish();
  return m;
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["kind"] = to_string(m.kind);
  if (m.kind == ModelKind::MultinomialConditional) j["categories"] = m.categories;
  if (m.kind == ModelKind::LinRegKnownVar) {
    j["noise_variance"] = m.noise_variance;
    j["covariates"] = m.covariates;
  }
  if (m.kind == ModelKind::ExpPairCopula) j["copula"] = copula_to_json(*m.pair_copula);
  return j;
}

DVine vine_from_copula(const CopulaSpec& c) {
  if (c.is_elliptical()) {
    const DVine structure(c.dim());
    return DVine(c.dim(), induced_tau(c.correlation(), structure).tau);
  }
  if (c.family() == CopulaFamily::Independence) return DVine(c.dim());
  return DVine(2, {c.kendall_tau()});
}

RunConfig parse_config_json(Subcommand command, const json& doc, const ConfigOverrides& overrides) {
  const bool strict = overrides.strict;
  const json root = doc.is_null() ? json::object() : doc;
  Section s(root, "", strict);
  RunConfig rc;
  rc.command = command;
  rc.seed = s.get<std::uint64_t>("seed", rc.seed);
  rc.output_dir = s.get<std::string>("output", rc.output_dir);
  rc.threads = s.get<int>("threads", 0);
  if (s.has("command") && s.get<std::string>("command", "") != to_string(command))
    throw ConfigError("command: config was written for '" + s.get<std::string>("command", "") + "'");

  switch (command) {
    case Subcommand::TauRetention:
    case Subcommand::Coverage:
    case Subcommand::GammaCoverage:
    case Subcommand::ModeConvergence:
    case Subcommand::RegressionCoverage: {
      const StudyKind kind = command == Subcommand::TauRetention      ? StudyKind::TauRetention
                             : command == Subcommand::Coverage        ? StudyKind::MultinomialCoverage
                             : command == Subcommand::GammaCoverage   ? StudyKind::GammaCoverage
                             : command == Subcommand::ModeConvergence ? StudyKind::ModeConvergence
                                                                      : StudyKind::RegressionCoverage;
      rc.study = StudyConfig::defaults(kind);
      if (s.has("study") && s.get<std::string>("study", "") != to_string(kind))
        throw ConfigError("study: config was written for '" + s.get<std::string>("study", "") + "'");
      read_study(s, rc.study);
      break;
    }
    case Subcommand::Diagnose:
      read_diagnose(s, rc.diagnose, strict);
      break;
    case Subcommand::CopulaInspect:
      rc.inspect.c1 = s.has("c1") ? copula_from_json(s.raw("c1"), "c1", strict) : CopulaSpec::independence(2);
      rc.inspect.c2 = s.has("c2") ? copula_from_json(s.raw("c2"), "c2", strict)
                                  : CopulaSpec::student_t(Eigen::MatrixXd::Identity(2, 2), 4.0);
      rc.inspect.grid = s.get<int>("grid", rc.inspect.grid);
      if (rc.inspect.grid < 2) throw ConfigError("grid: must be >= 2");
      break;
  }
  s.finish();

  if (overrides.seed) rc.seed = *overrides.seed;
  if (overrides.output) rc.output_dir = *overrides.output;
  if (overrides.threads) rc.threads = *overrides.threads;
  if (rc.threads < 0) throw ConfigError("threads: must be >= 0");
  rc.study.seed = rc.seed;
  rc.study.output_dir = rc.output_dir;
  if (overrides.repetitions) rc.study.repetitions = *overrides.repetitions;
  try {
    rc.study.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  json eff;
  switch (command) {
    case Subcommand::Diagnose: eff = diagnose_to_json(rc.diagnose); break;
    case Subcommand::CopulaInspect:
      eff = {{"c1", copula_to_json(*rc.inspect.c1)}, {"c2", copula_to_json(*rc.inspect.c2)}, {"grid", rc.inspect.grid}};
      break;
    default: eff = study_to_json(rc.study); break;
  }
  eff["command"] = to_string(command);
  eff["seed"] = rc.seed;
  eff["output"] = rc.output_dir;
  rc.effective = eff;
  return rc;
}

RunConfig parse_config(Subcommand command, const std::optional<std::string>& path, const ConfigOverrides& overrides) {
  json doc = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError(*path + ": cannot open config file");
    try {
      doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError(*path + ": " + e.what());
    }
  }
  return parse_config_json(command, doc, overrides);
}

}  // namespace copula_lab
