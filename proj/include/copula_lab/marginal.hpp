#pragma once

#include <string>

#include "copula_lab/rng.hpp"

namespace copula_lab {

enum class MarginalFamily { Beta, Gamma, Normal };

std::string to_string(MarginalFamily family);

/// Univariate prior: Beta(a, b), Gamma(shape, rate) or Normal(mean, variance).
class MarginalPrior {
 public:
  static MarginalPrior beta(double a, double b);
  static MarginalPrior gamma(double shape, double rate);
  static MarginalPrior normal(double mean, double variance);

  MarginalFamily family() const { return family_; }
  /// (a, b), (shape, rate) or (mean, variance).
  double first() const { return p1_; }
  double second() const { return p2_; }

  bool in_support(double x) const;
  /// -inf outside the support.
  double log_pdf(double x) const;
  double pdf(double x) const;
  /// d/dx and d^2/dx^2 of log f at an interior x.
  double d_log_pdf(double x) const;
  double d2_log_pdf(double x) const;

  double cdf(double x) const;
  /// 1 - cdf(x) without cancellation.
  double sf(double x) const;
  double quantile(double p) const;
  /// u = cdf(x) and ubar = sf(x) with one special-function call: the tail farther from
  /// the mean is derived by subtraction, the nearer one evaluated directly.
  void tails(double x, double& u, double& ubar) const;

  double mean() const;
  double variance() const;
  double sample(Rng& rng) const;

  std::string describe() const;

 private:
  MarginalPrior(MarginalFamily family, double p1, double p2);

  MarginalFamily family_;
  double p1_;
  double p2_;
  double log_norm_;
};

}  // namespace copula_lab
