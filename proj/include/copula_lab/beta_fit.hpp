#pragma once

#include "copula_lab/errors.hpp"
#include "copula_lab/marginal.hpp"

namespace copula_lab {

struct BetaFit {
  double a = 0.0;
  double b = 0.0;
  /// Sum of squared CDF residuals at the three quartiles.
  double residual = 0.0;
  int iterations = 0;

  MarginalPrior prior() const { return MarginalPrior::beta(a, b); }
};

/// Raised when the fit does not reach its gradient tolerance; carries the best iterate.
class BetaFitError : public ConvergenceError {
 public:
  BetaFitError(const std::string& what, BetaFit best) : ConvergenceError(what), best_(best) {}
  const BetaFit& best() const { return best_; }

 private:
  BetaFit best_;
};

/// Beta(a, b) minimising sum_k (F(q_k; a, b) - k/4)^2 with equal weights.
/// Levenberg-Marquardt in (log a, log b) from a moment-matched start; stops when the
/// gradient norm falls below 1e-10. Throws ArgumentError unless 0 < q25 < q50 < q75 < 1.
BetaFit fit_beta_from_quartiles(double q25, double q50, double q75);

}  // namespace copula_lab
