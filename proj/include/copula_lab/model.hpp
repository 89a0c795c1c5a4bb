#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "copula_lab/copula.hpp"
#include "copula_lab/copula_prior.hpp"
#include "copula_lab/rng.hpp"

namespace copula_lab {

enum class ModelKind { MultinomialConditional, NormalMeanVar, GammaShapeRate, LinRegKnownVar, ExpPairCopula };

std::string to_string(ModelKind kind);

/// Parameterisations:
///   MultinomialConditional(w): theta = (Z_1, ..., Z_{w-1}) in (0,1)^{w-1}
///   NormalMeanVar:             theta = (mu, sigma^2)
///   GammaShapeRate:            theta = (alpha, beta), density beta^alpha y^(alpha-1) e^(-beta y) / Gamma(alpha)
///   LinRegKnownVar(s2, p):     theta = coefficients; y = x' theta + N(0, s2) with x ~ N(0, I_p)
///   ExpPairCopula(c):          theta = (lambda, kappa); exponential margins joined by the fixed copula c
struct ModelSpec {
  ModelKind kind = ModelKind::MultinomialConditional;
  int categories = 3;
  double noise_variance = 1.0;
  int covariates = 2;
  std::optional<CopulaSpec> pair_copula;

  static ModelSpec multinomial(int categories);
  static ModelSpec normal_mean_var();
  static ModelSpec gamma_shape_rate();
  static ModelSpec linreg_known_var(double noise_variance, int covariates);
  static ModelSpec exp_pair(CopulaSpec copula);

  int dim() const;
  bool in_interior(std::span<const double> theta) const;
  std::string describe() const;
};

/// Sufficient statistics (raw pairs for the exponential pair model).
struct Dataset {
  ModelKind kind = ModelKind::MultinomialConditional;
  std::int64_t n = 0;
  std::vector<std::int64_t> counts;  // multinomial
  double sum_y = 0.0;                // normal, gamma
  double sum_y2 = 0.0;               // normal
  double sum_log_y = 0.0;            // gamma
  Eigen::MatrixXd xtx;               // regression
  Eigen::VectorXd xty;
  double yty = 0.0;
  PointMatrix pairs;                 // exp pair: rows (y, y*)

  void validate() const;
};

/// Z_v = p_v / (1 - sum_{t<v} p_t), v < w.
Eigen::VectorXd z_from_p(std::span<const double> p);
/// p_v = Z_v prod_{t<v} (1 - Z_t); p_w takes the remainder.
Eigen::VectorXd p_from_z(std::span<const double> z);

/// -inf outside the interior.
double log_likelihood(const ModelSpec& model, std::span<const double> theta, const Dataset& data);
/// Value, gradient and Hessian in theta. Analytic except for the exponential pair model.
LogDensityDerivatives log_likelihood_derivatives(const ModelSpec& model, std::span<const double> theta,
                                                 const Dataset& data, int order);

/// n i.i.d. observations from m(. | theta0), reduced to sufficient statistics.
Dataset generate_data(const ModelSpec& model, std::span<const double> theta0, std::int64_t n, Rng& rng);

/// theta0 ~ design prior, then data given theta0.
std::pair<Eigen::VectorXd, Dataset> prior_predictive_generate(const ModelSpec& model, const CopulaPrior& design,
                                                              std::int64_t n, Rng& rng);

/// Regression maximum likelihood estimate (X'X)^{-1} X'y.
Eigen::VectorXd regression_mle(const Dataset& data);

}  // namespace copula_lab
