#include "copula_lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "copula_lab/errors.hpp"
#include "copula_lab/hpd.hpp"
#include "copula_lab/kde.hpp"
#include "copula_lab/kendall.hpp"
#include "copula_lab/kernels.hpp"
#include "copula_lab/mode.hpp"
#include "copula_lab/proposals.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

namespace {

// Stream tags keep data and analysis randomness apart.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kAnalysisStream = 2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t study_id(StudyKind k) { return static_cast<std::uint64_t>(k) + 1; }

// Outcome of one repetition.
struct RepOutcome {
  bool ok = false;
  std::string error;
  double value = 0.0;   // tau, coverage indicator or D2 <= D1 indicator
  double area = 0.0;
  double abs_diff = 0.0;
  bool low_ess = false;
};

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// Distribution-free standard error of a sample median from the order-statistic interval.
double median_se(std::vector<double> v) {
  if (v.size() < 4) return std::nan("");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double half = 1.96 * std::sqrt(n) / 2.0;
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(n / 2.0 - half)));
  const auto hi = static_cast<std::size_t>(std::min(n - 1.0, std::ceil(n / 2.0 + half)));
  return (v[hi] - v[lo]) / (2.0 * 1.96);
}

// Runs every (cell, repetition) pair in parallel and folds the outcomes per cell.
template <typename RepFn>
void run_cells(const StudyConfig& cfg, StudyResult& result, RepFn&& rep_fn) {
  const std::size_t reps = cfg.repetitions;
  const std::size_t cells = result.cells.size();
  std::vector<RepOutcome> outcomes(cells * reps);
  for_each_index(
      cells * reps,
      [&](std::size_t flat) {
        const std::size_t c = flat / reps, r = flat % reps;
        try {
          outcomes[flat] = rep_fn(c, r);
          outcomes[flat].ok = true;
        } catch (const std::exception& e) {
          outcomes[flat].ok = false;
          outcomes[flat].error = e.what();
        }
      },
      Execution::Parallel);

  for (std::size_t c = 0; c < cells; ++c) {
    CellResult& cell = result.cells[c];
    std::vector<double> areas, diffs;
    for (std::size_t r = 0; r < reps; ++r) {
      const RepOutcome& o = outcomes[c * reps + r];
      if (!o.ok) {
        ++cell.failures;
        std::string msg = o.error;
        for (std::size_t pos = msg.find('\n'); pos != std::string::npos; pos = msg.find('\n', pos))
          msg.replace(pos, 1, " | ");
        result.failure_log.push_back("cell " + std::to_string(c) + " rep " + std::to_string(r) + ": " + msg);
        continue;
      }
      cell.values.push_back(o.value);
      areas.push_back(o.area);
      diffs.push_back(o.abs_diff);
      cell.low_ess += o.low_ess ? 1 : 0;
    }
    cell.repetitions = cell.values.size();
    if (cell.values.empty()) {
      cell.estimate = cell.se = cell.min = cell.max = std::nan("");
      continue;
    }
    cell.min = *std::min_element(cell.values.begin(), cell.values.end());
    cell.max = *std::max_element(cell.values.begin(), cell.values.end());
    cell.median_area = median_of(areas);
    double mean_diff = 0.0;
    for (double d : diffs) mean_diff += d;
    mean_diff /= static_cast<double>(diffs.size());
    double var = 0.0;
    for (double d : diffs) var += (d - mean_diff) * (d - mean_diff);
    cell.mean_abs_diff = mean_diff;
    cell.mean_abs_diff_se =
        diffs.size() > 1 ? std::sqrt(var / static_cast<double>(diffs.size() - 1) / static_cast<double>(diffs.size())) : 0.0;
    cell.median_abs_diff = median_of(diffs);
  }
}

// Proportion estimate with its binomial standard error.
void fold_proportion(CellResult& cell) {
  if (cell.values.empty()) return;
  double p = 0.0;
  for (double v : cell.values) p += v;
  p /= static_cast<double>(cell.values.size());
  cell.estimate = p;
  cell.se = std::sqrt(p * (1.0 - p) / static_cast<double>(cell.values.size()));
}

template <typename Body>
StudyResult timed(const StudyConfig& cfg, Body&& body) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  StudyResult result;
  result.study = cfg.study;
  result.config = cfg;
  body(result);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

KdeOptions kde_options(const StudyConfig& cfg) {
  KdeOptions k;
  k.nx = k.ny = cfg.kde_grid;
  return k;
}

HpdOptions hpd_options(const StudyConfig& cfg, std::uint64_t seed) {
  HpdOptions h;
  h.qmc_points = cfg.qmc_points;
  h.qmc_replicates = cfg.qmc_replicates;
  h.seed = seed;
  return h;
}

// SIR posterior for a prior that differs from the proposal's prior only by its copula term.
PosteriorSample copula_reweighted_sir(const CopulaPrior& prior, const Proposal& proposal, const SirOptions& sir,
                                      Rng& rng, std::uint64_t seed) {
  if (prior.copula().family() == CopulaFamily::Independence) {
    return sir_posterior([&](std::span<const double> t) { return prior.in_support(t) ? 0.0 : kNegInf; },
                         proposal, sir, rng, seed);
  }
  return sir_posterior([&](std::span<const double> t) { return prior.log_copula_term(t); }, proposal, sir, rng, seed);
}

RepOutcome coverage_outcome(const PosteriorSample& post, const Eigen::VectorXd& theta0, const StudyConfig& cfg,
                            std::uint64_t seed) {
  const KdeSurface surface = kde2d(post.draws, kde_options(cfg));
  const HpdResult hpd = hpd_region(surface, cfg.hpd_level, Eigen::Vector2d(theta0[0], theta0[1]), hpd_options(cfg, seed));
  RepOutcome o;
  o.value = hpd.contains_target ? 1.0 : 0.0;
  o.area = hpd.area;
  o.low_ess = post.low_ess;
  return o;
}

}  // namespace

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::TauRetention: return "tau-retention";
    case StudyKind::MultinomialCoverage: return "coverage";
    case StudyKind::GammaCoverage: return "gamma-coverage";
    case StudyKind::ModeConvergence: return "mode-convergence";
    case StudyKind::RegressionCoverage: return "regression-coverage";
  }
  return "unknown";
}

StudyKind study_kind_from_string(const std::string& name) {
  for (auto k : {StudyKind::TauRetention, StudyKind::MultinomialCoverage, StudyKind::GammaCoverage,
                 StudyKind::ModeConvergence, StudyKind::RegressionCoverage})
    if (to_string(k) == name) return k;
  throw ArgumentError("unknown study '" + name + "'");
}

std::string to_string(RegressionPrior prior) {
  return prior == RegressionPrior::Independence ? "independence" : "t";
}

StudyConfig StudyConfig::defaults(StudyKind kind) {
  StudyConfig c;
  c.study = kind;
  if (kind == StudyKind::MultinomialCoverage) {
    c.nature_rho = -0.9;
    for (int k = -19; k <= 19; ++k) c.rho_grid.push_back(k * 0.05);
  } else if (kind == StudyKind::GammaCoverage) {
    c.nature_rho = 0.4;
    for (int k = 0; k <= 19; ++k) c.rho_grid.push_back(k * 0.05);
  }
  return c;
}

void StudyConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) { throw ArgumentError(field + ": " + why); };
  if (repetitions < 1) fail("repetitions", "must be >= 1");
  if (sample_sizes.empty()) fail("sample_sizes", "must not be empty");
  for (std::size_t i = 0; i < sample_sizes.size(); ++i)
    if (sample_sizes[i] < 1) fail("sample_sizes[" + std::to_string(i) + "]", "must be positive");
  if (!(nature_rho > -1.0 && nature_rho < 1.0)) fail("nature_rho", "must lie in (-1,1)");
  const bool coverage = study == StudyKind::MultinomialCoverage || study == StudyKind::GammaCoverage;
  if (coverage && rho_grid.empty()) fail("rho_grid", "must not be empty");
  for (std::size_t i = 0; i < rho_grid.size(); ++i)
    if (!(rho_grid[i] > -1.0 && rho_grid[i] < 1.0)) fail("rho_grid[" + std::to_string(i) + "]", "must lie in (-1,1)");
  const bool regression = study == StudyKind::ModeConvergence || study == StudyKind::RegressionCoverage;
  if (regression && cases.empty()) fail("cases", "must not be empty");
  for (std::size_t i = 0; i < cases.size(); ++i)
    if (cases[i] < 1 || cases[i] > 6) fail("cases[" + std::to_string(i) + "]", "must be between 1 and 6");
  if (study == StudyKind::RegressionCoverage && priors.empty()) fail("priors", "must not be empty");
  if (!(noise_variance > 0.0)) fail("noise_variance", "must be positive");
  if (!(t_nu > 0.0)) fail("t_nu", "must be positive");
  if (!(mode_tolerance > 0.0)) fail("mode_tolerance", "must be positive");
  if (sir.resample_size < 1) fail("sir.resample_size", "must be >= 1");
  if (sir.proposal_size < sir.resample_size) fail("sir.proposal_size", "must be >= sir.resample_size");
  if (kde_grid < 2) fail("kde.grid", "must be >= 2");
  if (!(hpd_level > 0.0 && hpd_level < 1.0)) fail("hpd.level", "must lie in (0,1)");
  if (qmc_points < 1) fail("hpd.qmc_points", "must be >= 1");
  if (qmc_replicates < 2) fail("hpd.qmc_replicates", "must be >= 2");
}

RegressionCase regression_case(int id) {
  auto from_u = [](double a, double b) { return Eigen::Vector2d(normal_quantile(a), normal_quantile(b)); };
  switch (id) {
    case 1: return {1, "u0=(0.5,0.5)", Eigen::Vector2d(0.0, 0.0)};
    case 2: return {2, "u0=(0.495,0.495)", from_u(0.495, 0.495)};
    case 3: {
      const double u = StudentT(4.0).cdf(1.0);
      return {3, "u0=(F(1;4),F(1;4))", from_u(u, u)};
    }
    case 4: return {4, "u0=(0.5,0.99)", from_u(0.5, 0.99)};
    case 5: return {5, "u0=(0.85,0.9)", from_u(0.85, 0.9)};
    case 6: return {6, "theta0=(-5,8)", Eigen::Vector2d(-5.0, 8.0)};
    default: throw ArgumentError("regression case must be between 1 and 6");
  }
}

CopulaPrior multinomial_study_prior(double rho) {
  return CopulaPrior({MarginalPrior::beta(20.0, 40.0), MarginalPrior::beta(30.0, 30.0)}, CopulaSpec::gaussian(rho));
}

CopulaPrior gamma_study_prior(double rho) {
  return CopulaPrior({MarginalPrior::gamma(1000.0, 5000.0), MarginalPrior::gamma(1000.0, 800.0)},
                     CopulaSpec::gaussian(rho));
}

CopulaPrior regression_study_prior(RegressionPrior prior, double nu) {
  std::vector<MarginalPrior> m{MarginalPrior::normal(0.0, 1.0), MarginalPrior::normal(0.0, 1.0)};
  if (prior == RegressionPrior::Independence) return CopulaPrior(std::move(m), CopulaSpec::independence(2));
  return CopulaPrior(std::move(m), CopulaSpec::student_t(Eigen::MatrixXd::Identity(2, 2), nu));
}

StudyResult run_tau_retention(const StudyConfig& cfg) {
  if (cfg.study != StudyKind::TauRetention) throw ArgumentError("run_tau_retention: wrong study kind");
  return timed(cfg, [&](StudyResult& result) {
    const ModelSpec model = ModelSpec::multinomial(3);
    const CopulaPrior prior = multinomial_study_prior(cfg.nature_rho);
    for (auto n : cfg.sample_sizes) {
      CellResult c;
      c.n = n;
      c.rho = cfg.nature_rho;
      result.cells.push_back(c);
    }
    run_cells(cfg, result, [&](std::size_t c, std::size_t r) {
      const std::int64_t n = result.cells[c].n;
      Rng data_rng = make_stream(cfg.seed, {study_id(cfg.study), static_cast<std::uint64_t>(n), r, kDataStream});
      const auto [theta0, data] = prior_predictive_generate(model, prior, n, data_rng);
      const auto proposal = conjugate_proposal(model, prior.marginals(), data);
      const std::uint64_t seed = stream_seed(cfg.seed, {study_id(cfg.study), c, r, kAnalysisStream});
      Rng rng(seed);
      const PosteriorSample post = copula_reweighted_sir(prior, *proposal, cfg.sir, rng, seed);
      RepOutcome o;
      o.value = kendall_tau(post.draws);
      o.low_ess = post.low_ess;
      return o;
    });
    for (auto& cell : result.cells) {
      cell.estimate = median_of(cell.values);
      cell.se = median_se(cell.values);
    }
  });
}

StudyResult run_coverage(const StudyConfig& cfg) {
  const bool gamma = cfg.study == StudyKind::GammaCoverage;
  if (!gamma && cfg.study != StudyKind::MultinomialCoverage) throw ArgumentError("run_coverage: wrong study kind");
  return timed(cfg, [&](StudyResult& result) {
    const ModelSpec model = gamma ? ModelSpec::gamma_shape_rate() : ModelSpec::multinomial(3);
    const CopulaPrior nature = gamma ? gamma_study_prior(cfg.nature_rho) : multinomial_study_prior(cfg.nature_rho);
    std::vector<CopulaPrior> analysis;
    for (double rho : cfg.rho_grid) {
      for (auto n : cfg.sample_sizes) {
        CellResult c;
        c.n = n;
        c.rho = rho;
        result.cells.push_back(c);
      }
      analysis.push_back(nature.with_copula(CopulaSpec::gaussian(rho)));
    }
    const std::size_t per_rho = cfg.sample_sizes.size();
    run_cells(cfg, result, [&](std::size_t c, std::size_t r) {
      const std::int64_t n = result.cells[c].n;
      const CopulaPrior& prior = analysis[c / per_rho];
      // The same theta0 and data feed every analysis prior at a given (n, r).
      Rng data_rng = make_stream(cfg.seed, {study_id(cfg.study), static_cast<std::uint64_t>(n), r, kDataStream});
      const auto [theta0, data] = prior_predictive_generate(model, nature, n, data_rng);
      const std::uint64_t seed = stream_seed(cfg.seed, {study_id(cfg.study), c, r, kAnalysisStream});
      Rng rng(seed);
      PosteriorSample post;
      if (gamma) {
        const auto proposal = laplace_proposal(model, prior.marginals(), data);
        post = sir_posterior(
            [&](std::span<const double> t) {
              const double lp = prior.log_pdf(t);
              if (!std::isfinite(lp)) return kNegInf;
              return log_likelihood(model, t, data) + lp - proposal->log_pdf(t);
            },
            *proposal, cfg.sir, rng, seed);
      } else {
        const auto proposal = conjugate_proposal(model, prior.marginals(), data);
        post = copula_reweighted_sir(prior, *proposal, cfg.sir, rng, seed);
      }
      return coverage_outcome(post, theta0, cfg, seed);
    });
    for (auto& cell : result.cells) fold_proportion(cell);
  });
}

StudyResult run_mode_convergence(const StudyConfig& cfg) {
  if (cfg.study != StudyKind::ModeConvergence) throw ArgumentError("run_mode_convergence: wrong study kind");
  return timed(cfg, [&](StudyResult& result) {
    const ModelSpec model = ModelSpec::linreg_known_var(cfg.noise_variance, 2);
    const CopulaPrior p1 = regression_study_prior(RegressionPrior::Independence, cfg.t_nu);
    const CopulaPrior p2 = regression_study_prior(RegressionPrior::StudentT, cfg.t_nu);
    for (int id : cfg.cases) {
      for (auto n : cfg.sample_sizes) {
        CellResult c;
        c.case_id = id;
        c.n = n;
        result.cells.push_back(c);
      }
    }
    ModeOptions opts;
    opts.tolerance = cfg.mode_tolerance;
    run_cells(cfg, result, [&](std::size_t c, std::size_t r) {
      const CellResult& cell = result.cells[c];
      const Eigen::Vector2d theta0 = regression_case(cell.case_id).theta0;
      Rng rng = make_stream(cfg.seed, {study_id(cfg.study), static_cast<std::uint64_t>(cell.case_id),
                                       static_cast<std::uint64_t>(cell.n), r, kDataStream});
      const Dataset data = generate_data(model, {theta0.data(), 2}, cell.n, rng);
      auto posterior = [&](const CopulaPrior& prior) {
        return [&, prior_ptr = &prior](const Eigen::VectorXd& t, int order) {
          const std::span<const double> s(t.data(), 2);
          LogDensityDerivatives l = log_likelihood_derivatives(model, s, data, order);
          const LogDensityDerivatives p = prior_ptr->log_pdf_derivatives(s, order);
          l.value += p.value;
          if (order >= 1) l.gradient += p.gradient;
          if (order >= 2) l.hessian += p.hessian;
          return l;
        };
      };
      const ModeResult m1 = posterior_mode(posterior(p1), Eigen::Vector2d::Zero(), opts);
      const ModeResult m2 = posterior_mode(posterior(p2), m1.theta, opts);
      const double d1 = (m1.theta - theta0).norm();
      const double d2 = (m2.theta - theta0).norm();
      RepOutcome o;
      o.value = d2 <= d1 ? 1.0 : 0.0;
      o.abs_diff = std::abs(d2 - d1);
      return o;
    });
    for (auto& cell : result.cells) fold_proportion(cell);
  });
}

StudyResult run_regression_coverage(const StudyConfig& cfg) {
  if (cfg.study != StudyKind::RegressionCoverage) throw ArgumentError("run_regression_coverage: wrong study kind");
  return timed(cfg, [&](StudyResult& result) {
    const ModelSpec model = ModelSpec::linreg_known_var(cfg.noise_variance, 2);
    std::vector<CopulaPrior> priors;
    for (auto p : cfg.priors) priors.push_back(regression_study_prior(p, cfg.t_nu));
    std::vector<std::size_t> prior_of_cell;
    for (int id : cfg.cases) {
      for (std::size_t k = 0; k < cfg.priors.size(); ++k) {
        for (auto n : cfg.sample_sizes) {
          CellResult c;
          c.case_id = id;
          c.prior = to_string(cfg.priors[k]);
          c.n = n;
          result.cells.push_back(c);
          prior_of_cell.push_back(k);
        }
      }
    }
    run_cells(cfg, result, [&](std::size_t c, std::size_t r) {
      const CellResult& cell = result.cells[c];
      const CopulaPrior& prior = priors[prior_of_cell[c]];
      const Eigen::Vector2d theta0 = regression_case(cell.case_id).theta0;
      // Shared by both priors at a given (case, n, r).
      Rng data_rng = make_stream(cfg.seed, {study_id(cfg.study), static_cast<std::uint64_t>(cell.case_id),
                                            static_cast<std::uint64_t>(cell.n), r, kDataStream});
      const Dataset data = generate_data(model, {theta0.data(), 2}, cell.n, data_rng);
      const auto proposal = conjugate_proposal(model, prior.marginals(), data);
      const std::uint64_t seed = stream_seed(cfg.seed, {study_id(cfg.study), c, r, kAnalysisStream});
      Rng rng(seed);
      const PosteriorSample post = copula_reweighted_sir(prior, *proposal, cfg.sir, rng, seed);
      return coverage_outcome(post, theta0, cfg, seed);
    });
    for (auto& cell : result.cells) fold_proportion(cell);
  });
}

StudyResult run_study(const StudyConfig& cfg) {
  switch (cfg.study) {
    case StudyKind::TauRetention: return run_tau_retention(cfg);
    case StudyKind::MultinomialCoverage:
    case StudyKind::GammaCoverage: return run_coverage(cfg);
    case StudyKind::ModeConvergence: return run_mode_convergence(cfg);
    case StudyKind::RegressionCoverage: return run_regression_coverage(cfg);
  }
  throw ArgumentError("run_study: unknown study");
}

}  // namespace copula_lab
