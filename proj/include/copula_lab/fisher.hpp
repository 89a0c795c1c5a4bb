#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "copula_lab/model.hpp"
#include "copula_lab/rng.hpp"

namespace copula_lab {

/// Per-observation Fisher information I(theta0) where a closed form exists
/// (every model except the exponential pair).
Eigen::MatrixXd fisher_information(const ModelSpec& model, std::span<const double> theta0);

/// I(theta0)^{-1} per observation. Closed forms for the multinomial, normal, gamma and
/// regression models; the exponential pair model falls back to the numeric oracle.
Eigen::MatrixXd inverse_fisher(const ModelSpec& model, std::span<const double> theta0);

/// Correlation matrix of a covariance matrix.
Eigen::MatrixXd covariance_to_correlation(const Eigen::MatrixXd& cov);

/// Limiting posterior correlation of (alpha, beta) in the gamma model: 1 / sqrt(alpha psi_1(alpha)).
double gamma_implied_correlation(double alpha);

enum class FisherMethod { ScoreCovariance, HessianExpectation };

struct NumericFisher {
  Eigen::MatrixXd information;     // per observation
  Eigen::MatrixXd information_se;  // Monte Carlo standard errors, entrywise
  Eigen::MatrixXd inverse;
  Eigen::MatrixXd inverse_se;      // delta method
  double condition = 0.0;
  std::int64_t draws = 0;
};

/// Monte Carlo Fisher information from single-observation log-likelihoods, using central
/// differences only (no analytic derivatives). Standard errors of the inverse come from
/// the delta method applied to the sample covariance of the per-draw terms. Throws SingularMatrixError when the
/// estimate has condition number above 1e12.
NumericFisher numeric_fisher_oracle(const ModelSpec& model, std::span<const double> theta0, FisherMethod method,
                                    std::int64_t draws, Rng& rng);

}  // namespace copula_lab
