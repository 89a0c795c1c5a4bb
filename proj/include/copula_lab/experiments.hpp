#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "copula_lab/copula_prior.hpp"
#include "copula_lab/model.hpp"
#include "copula_lab/sir.hpp"

namespace copula_lab {

enum class StudyKind { TauRetention, MultinomialCoverage, GammaCoverage, ModeConvergence, RegressionCoverage };

std::string to_string(StudyKind kind);
StudyKind study_kind_from_string(const std::string& name);

enum class RegressionPrior { Independence, StudentT };

std::string to_string(RegressionPrior prior);

struct StudyConfig {
  StudyKind study = StudyKind::TauRetention;
  std::uint64_t seed = 20240521;
  std::size_t repetitions = 1000;
  std::vector<std::int64_t> sample_sizes{10, 100, 1000, 10000, 100000};
  /// Analysis-prior copula correlations (coverage studies).
  std::vector<double> rho_grid;
  /// Design ("nature's") prior copula correlation; -0.9 multinomial, 0.4 gamma.
  double nature_rho = -0.9;
  /// Regression cases 1..6 (mode and regression-coverage studies).
  std::vector<int> cases{1, 2, 3, 4, 5, 6};
  std::vector<RegressionPrior> priors{RegressionPrior::Independence, RegressionPrior::StudentT};
  double noise_variance = 5.0;
  double t_nu = 4.0;
  double mode_tolerance = 1e-10;
  SirOptions sir;
  int kde_grid = 150;
  double hpd_level = 0.95;
  int qmc_points = 4096;
  int qmc_replicates = 8;
  std::string output_dir = "results";

  /// Throws ArgumentError naming the offending field.
  void validate() const;
  /// Documented defaults for a study (grids, nature's rho).
  static StudyConfig defaults(StudyKind kind);
};

/// One cell of a study grid.
struct CellResult {
  std::int64_t n = 0;
  double rho = 0.0;                 // coverage studies
  int case_id = 0;                  // mode and regression studies
  std::string prior;                // regression study
  std::size_t repetitions = 0;      // successful repetitions
  std::size_t failures = 0;
  std::size_t low_ess = 0;          // SIR runs flagged with ESS < 0.01 N

  /// Main estimate: median tau, coverage or Pr(D2 <= D1).
  double estimate = 0.0;
  double se = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median_area = 0.0;         // coverage studies
  double mean_abs_diff = 0.0;       // mode study: mean |D2 - D1|
  double mean_abs_diff_se = 0.0;
  double median_abs_diff = 0.0;
  std::vector<double> values;       // per-repetition main values, repetition order
};

struct StudyResult {
  StudyKind study = StudyKind::TauRetention;
  StudyConfig config;
  std::vector<CellResult> cells;
  std::vector<std::string> failure_log;  // "cell <i> rep <r>: <message>", ordered
  double wall_seconds = 0.0;
};

/// Regression case: u0 for N(0,1) marginals and theta0 = Phi^{-1}(u0) (case 6 fixes theta0).
struct RegressionCase {
  int id;
  std::string description;
  Eigen::Vector2d theta0;
};

RegressionCase regression_case(int id);

/// Beta(20,40) x Beta(30,30) joined by a Gaussian copula with correlation rho.
CopulaPrior multinomial_study_prior(double rho);
/// Gamma(1000, 5000) x Gamma(1000, 800) (shape, rate) joined by a Gaussian copula with correlation rho.
CopulaPrior gamma_study_prior(double rho);
/// N(0,1) x N(0,1) with the independence or t(I, nu) copula.
CopulaPrior regression_study_prior(RegressionPrior prior, double nu);

StudyResult run_tau_retention(const StudyConfig& cfg);
/// MultinomialCoverage or GammaCoverage, according to cfg.study.
StudyResult run_coverage(const StudyConfig& cfg);
StudyResult run_mode_convergence(const StudyConfig& cfg);
StudyResult run_regression_coverage(const StudyConfig& cfg);
/// Dispatches on cfg.study.
StudyResult run_study(const StudyConfig& cfg);

}  // namespace copula_lab
