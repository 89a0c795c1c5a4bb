#pragma once

namespace copula_lab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Standard normal.
double normal_pdf(double x);
double normal_log_pdf(double x);
double normal_cdf(double x);
/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);
/// Phi^{-1}(p) for p in (0,1): rational approximation refined by one Halley step.
double normal_quantile(double p);

/// Score x with Phi(x) = u, given both u and its complement ubar = 1-u.
/// Uses whichever tail is smaller so that u close to 1 keeps full precision.
double normal_score(double u, double ubar);

/// Trigamma psi_1(x), x > 0: recurrence up to x >= 8 followed by the asymptotic series.
double trigamma(double x);
double digamma(double x);
double log_gamma(double x);

/// Student t distribution with nu > 0 degrees of freedom (location 0, scale 1).
class StudentT {
 public:
  explicit StudentT(double nu);

  double nu() const { return nu_; }
  double log_pdf(double x) const;
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const { return cdf(-x); }

  /// Lower-tail quantile, p in (0,1). Bracketed Newton on the CDF, |dx| <= 1e-12 max(1,|x|).
  double quantile(double p) const;
  /// Score x with T(x) = u given u and ubar = 1-u; exact in either tail.
  double score(double u, double ubar) const;

 private:
  // Quantile of the lower tail for p <= 0.5 (result <= 0).
  double lower_quantile(double p) const;

  double nu_;
  double log_norm_;
};

}  // namespace copula_lab
