#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "copula_lab/rng.hpp"

namespace copula_lab {

/// n x d sample, one point per row (rows are contiguous).
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class CopulaFamily { Independence, Gaussian, StudentT, Clayton, Gumbel, Frank };

std::string to_string(CopulaFamily family);
CopulaFamily copula_family_from_string(const std::string& name);

/// Value of log c(u) with optional first and second derivatives in u.
struct LogDensityDerivatives {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// An absolutely continuous copula with full support on (0,1)^d.
///
/// Elliptical families (Gaussian, Student t) accept any dimension; the Archimedean
/// families are bivariate. Instances are immutable and safe to share across threads.
///
/// Densities accept the point u together with its complement ubar = 1 - u. Supplying
/// ubar explicitly keeps precision when a coordinate sits within a few ulps of 1
/// (e.g. Phi(8) = 1 - 6.2e-16); the single-argument overloads compute ubar = 1 - u.
class CopulaSpec {
 public:
  static CopulaSpec independence(int dim);
  static CopulaSpec gaussian(const Eigen::MatrixXd& correlation);
  static CopulaSpec gaussian(double rho);
  static CopulaSpec student_t(const Eigen::MatrixXd& correlation, double nu);
  static CopulaSpec student_t(double rho, double nu);
  /// Clayton, theta >= 0 (theta = 0 is the independence limit).
  static CopulaSpec clayton(double theta);
  /// Gumbel, theta >= 1.
  static CopulaSpec gumbel(double theta);
  /// Frank, any real theta (theta = 0 is the independence limit).
  static CopulaSpec frank(double theta);

  CopulaFamily family() const { return family_; }
  int dim() const { return dim_; }
  const Eigen::MatrixXd& correlation() const { return correlation_; }
  double nu() const { return nu_; }
  double parameter() const { return theta_; }
  bool is_elliptical() const {
    return family_ == CopulaFamily::Gaussian || family_ == CopulaFamily::StudentT;
  }

  double log_density(std::span<const double> u) const;
  double log_density(std::span<const double> u, std::span<const double> ubar) const;

  Eigen::VectorXd log_density_grad(std::span<const double> u) const;
  Eigen::MatrixXd log_density_hessian(std::span<const double> u) const;

  /// order 0: value only; 1: + gradient; 2: + Hessian.
  LogDensityDerivatives log_density_derivatives(std::span<const double> u,
                                                std::span<const double> ubar,
                                                int order) const;

  PointMatrix sample(std::size_t n, Rng& rng) const;

  /// Kendall's tau of a bivariate member (for elliptical families, of the (1,2) pair).
  double kendall_tau() const;

  std::string describe() const;

 private:
  CopulaSpec() = default;

  void check_point(std::span<const double> u, std::span<const double> ubar) const;
  double elliptical_log_density(const Eigen::VectorXd& x) const;
  LogDensityDerivatives elliptical_derivatives(std::span<const double> u,
                                               std::span<const double> ubar, int order) const;
  double archimedean_log_density(double u, double v, double ubar, double vbar) const;
  LogDensityDerivatives archimedean_derivatives(std::span<const double> u,
                                                std::span<const double> ubar, int order) const;
  Eigen::Vector2d archimedean_gradient(double u, double v, double ubar, double vbar) const;

  CopulaFamily family_ = CopulaFamily::Independence;
  int dim_ = 2;
  Eigen::MatrixXd correlation_;
  Eigen::MatrixXd precision_;      // R^{-1}
  Eigen::MatrixXd cholesky_;       // lower factor L, R = L L^T
  double log_det_ = 0.0;
  double nu_ = 0.0;
  double theta_ = 0.0;
  double t_log_const_ = 0.0;       // normalising constants of the t copula density
};

/// Kendall's tau of a Gaussian or t copula pair with linear correlation rho: 2 asin(rho) / pi.
double rho_to_tau(double rho);
/// Inverse of rho_to_tau: sin(pi tau / 2).
double tau_to_rho(double tau);
/// Kendall's tau of an Archimedean family member.
double archimedean_param_to_tau(CopulaFamily family, double parameter);
/// Inverse of archimedean_param_to_tau (Clayton, Gumbel and Frank).
double tau_to_archimedean_param(CopulaFamily family, double tau);

/// Validates a correlation matrix: symmetric, unit diagonal, positive definite.
void validate_correlation(const Eigen::MatrixXd& r);

}  // namespace copula_lab
