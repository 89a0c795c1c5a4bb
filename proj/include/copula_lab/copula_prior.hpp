#pragma once

#include <span>
#include <string>
#include <vector>

#include "copula_lab/copula.hpp"
#include "copula_lab/marginal.hpp"

namespace copula_lab {

/// Joint prior p(theta) = prod_j f_j(theta_j) * c(F_1(theta_1), ..., F_d(theta_d)).
class CopulaPrior {
 public:
  CopulaPrior(std::vector<MarginalPrior> marginals, CopulaSpec copula);

  int dim() const { return static_cast<int>(marginals_.size()); }
  const std::vector<MarginalPrior>& marginals() const { return marginals_; }
  const CopulaSpec& copula() const { return copula_; }

  bool in_support(std::span<const double> theta) const;

  /// -inf outside the product support.
  double log_pdf(std::span<const double> theta) const;

  /// log c(F_1(theta_1), ..., F_d(theta_d)) alone: the ratio of this prior to the same
  /// marginals joined independently. -inf outside the support.
  double log_copula_term(std::span<const double> theta) const;

  /// Value, gradient and Hessian in theta (order as for CopulaSpec). Requires interior theta.
  LogDensityDerivatives log_pdf_derivatives(std::span<const double> theta, int order) const;

  /// Copula draws mapped through the marginal quantiles.
  PointMatrix sample(std::size_t n, Rng& rng) const;

  /// Same marginals joined by a different copula.
  CopulaPrior with_copula(CopulaSpec copula) const;

  std::string describe() const;

 private:
  std::vector<MarginalPrior> marginals_;
  CopulaSpec copula_;
};

}  // namespace copula_lab
