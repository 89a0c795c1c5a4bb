#include "copula_lab/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "copula_lab/errors.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

namespace {

constexpr double kOneBelow = 1.0 - 0x1.0p-53;

double clamp_open(double u) {
  if (u <= 0.0) return std::numeric_limits<double>::min();
  if (u >= 1.0) return kOneBelow;
  return u;
}

// log(e^a + e^b - 1) for a, b >= 0.
double log_sum_exp_minus_one(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

// -log(u), accurate for u close to 1 through its complement.
double neg_log(double u, double ubar) { return u > 0.5 ? -std::log1p(-ubar) : -std::log(u); }

// Debye function D1(x) = (1/x) int_0^x t / (e^t - 1) dt.
double debye1(double x) {
  if (x == 0.0) return 1.0;
  if (x < 0.0) return debye1(-x) - 0.5 * x;
  auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, x, 15, 1e-14);
  return integral / x;
}

double fd_step(double u, double ubar, double base) {
  return std::min(base, 0.5 * std::min(u, ubar));
}

}  // namespace

std::string to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Gaussian: return "gaussian";
    case CopulaFamily::StudentT: return "student_t";
    case CopulaFamily::Clayton: return "clayton";
    case CopulaFamily::Gumbel: return "gumbel";
    case CopulaFamily::Frank: return "frank";
  }
  return "unknown";
}

CopulaFamily copula_family_from_string(const std::string& name) {
  if (name == "independence") return CopulaFamily::Independence;
  if (name == "gaussian") return CopulaFamily::Gaussian;
  if (name == "student_t" || name == "t") return CopulaFamily::StudentT;
  if (name == "clayton") return CopulaFamily::Clayton;
  if (name == "gumbel") return CopulaFamily::Gumbel;
  if (name == "frank") return CopulaFamily::Frank;
  throw ArgumentError("unknown copula family '" + name + "'");
}

void validate_correlation(const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols() || r.rows() < 2)
    throw ParameterError("correlation matrix must be square with dimension >= 2");
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12) throw ParameterError("correlation matrix must have unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (!std::isfinite(r(i, j)) || std::abs(r(i, j) - r(j, i)) > 1e-12)
        throw ParameterError("correlation matrix must be symmetric and finite");
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12)
    throw ParameterError("correlation matrix is not positive definite");
}

CopulaSpec CopulaSpec::independence(int dim) {
  if (dim < 1) throw ParameterError("copula dimension must be positive");
  CopulaSpec c;
  c.family_ = CopulaFamily::Independence;
  c.dim_ = dim;
  return c;
}

CopulaSpec CopulaSpec::gaussian(const Eigen::MatrixXd& correlation) {
  validate_correlation(correlation);
  CopulaSpec c;
  c.family_ = CopulaFamily::Gaussian;
  c.dim_ = static_cast<int>(correlation.rows());
  c.correlation_ = correlation;
  Eigen::LLT<Eigen::MatrixXd> llt(correlation);
  c.cholesky_ = llt.matrixL();
  c.precision_ = llt.solve(Eigen::MatrixXd::Identity(c.dim_, c.dim_));
  c.log_det_ = 2.0 * c.cholesky_.diagonal().array().log().sum();
  return c;
}

CopulaSpec CopulaSpec::gaussian(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw ParameterError("gaussian copula: rho must lie in (-1,1)");
  Eigen::MatrixXd r(2, 2);
  r << 1.0, rho, rho, 1.0;
  return gaussian(r);
}

CopulaSpec CopulaSpec::student_t(const Eigen::MatrixXd& correlation, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("t copula: nu must be positive and finite");
  CopulaSpec c = gaussian(correlation);
  c.family_ = CopulaFamily::StudentT;
  c.nu_ = nu;
  const double d = c.dim_;
  c.t_log_const_ = log_gamma(0.5 * (nu + d)) + (d - 1.0) * log_gamma(0.5 * nu) -
                   d * log_gamma(0.5 * (nu + 1.0)) - 0.5 * c.log_det_;
  return c;
}

CopulaSpec CopulaSpec::student_t(double rho, double nu) {
  if (!(rho > -1.0 && rho < 1.0)) throw ParameterError("t copula: rho must lie in (-1,1)");
  Eigen::MatrixXd r(2, 2);
  r << 1.0, rho, rho, 1.0;
  return student_t(r, nu);
}

CopulaSpec CopulaSpec::clayton(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ParameterError("clayton copula: theta must be >= 0");
  CopulaSpec c;
  c.family_ = CopulaFamily::Clayton;
  c.theta_ = theta;
  return c;
}

CopulaSpec CopulaSpec::gumbel(double theta) {
  if (!(theta >= 1.0) || !std::isfinite(theta)) throw ParameterError("gumbel copula: theta must be >= 1");
  CopulaSpec c;
  c.family_ = CopulaFamily::Gumbel;
  c.theta_ = theta;
  return c;
}

CopulaSpec CopulaSpec::frank(double theta) {
  if (!std::isfinite(theta) || std::abs(theta) > 700.0)
    throw ParameterError("frank copula: theta must be finite with |theta| <= 700");
  CopulaSpec c;
  c.family_ = CopulaFamily::Frank;
  c.theta_ = theta;
  return c;
}

void CopulaSpec::check_point(std::span<const double> u, std::span<const double> ubar) const {
  if (static_cast<int>(u.size()) != dim_ || static_cast<int>(ubar.size()) != dim_)
    throw ArgumentError("copula point has the wrong dimension");
  for (std::size_t j = 0; j < u.size(); ++j) {
    // u may round to 1 while its complement is still representable; only the pair matters.
    if (!(u[j] > 0.0 && ubar[j] > 0.0 && u[j] <= 1.0 && ubar[j] <= 1.0))
      throw DomainError("copula density requires u strictly inside (0,1)^d");
  }
}

double CopulaSpec::log_density(std::span<const double> u) const {
  std::vector<double> ubar(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) ubar[j] = 1.0 - u[j];
  return log_density(u, ubar);
}

double CopulaSpec::log_density(std::span<const double> u, std::span<const double> ubar) const {
  return log_density_derivatives(u, ubar, 0).value;
}

Eigen::VectorXd CopulaSpec::log_density_grad(std::span<const double> u) const {
  std::vector<double> ubar(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) ubar[j] = 1.0 - u[j];
  return log_density_derivatives(u, ubar, 1).gradient;
}

Eigen::MatrixXd CopulaSpec::log_density_hessian(std::span<const double> u) const {
  std::vector<double> ubar(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) ubar[j] = 1.0 - u[j];
  return log_density_derivatives(u, ubar, 2).hessian;
}

LogDensityDerivatives CopulaSpec::log_density_derivatives(std::span<const double> u,
                                                          std::span<const double> ubar,
                                                          int order) const {
  check_point(u, ubar);
  switch (family_) {
    case CopulaFamily::Independence: {
      LogDensityDerivatives out;
      if (order >= 1) out.gradient = Eigen::VectorXd::Zero(dim_);
      if (order >= 2) out.hessian = Eigen::MatrixXd::Zero(dim_, dim_);
      return out;
    }
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT:
      return elliptical_derivatives(u, ubar, order);
    default:
      return archimedean_derivatives(u, ubar, order);
  }
}

double CopulaSpec::elliptical_log_density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd px = precision_ * x;
  const double q = x.dot(px);
  if (family_ == CopulaFamily::Gaussian) return -0.5 * log_det_ - 0.5 * (q - x.squaredNorm());
  double marg = 0.0;
  for (int j = 0; j < dim_; ++j) marg += std::log1p(x[j] * x[j] / nu_);
  return t_log_const_ - 0.5 * (nu_ + dim_) * std::log1p(q / nu_) + 0.5 * (nu_ + 1.0) * marg;
}

LogDensityDerivatives CopulaSpec::elliptical_derivatives(std::span<const double> u,
                                                         std::span<const double> ubar,
                                                         int order) const {
  const bool gaussian = family_ == CopulaFamily::Gaussian;
  Eigen::VectorXd x(dim_);
  if (gaussian) {
    for (int j = 0; j < dim_; ++j) x[j] = normal_score(u[j], ubar[j]);
  } else {
    const StudentT t(nu_);
    for (int j = 0; j < dim_; ++j) x[j] = t.score(u[j], ubar[j]);
  }
  LogDensityDerivatives out;
  out.value = elliptical_log_density(x);
  if (order < 1) return out;

  // Derivatives in score space, then the chain rule dx/du = 1 / f(x).
  const Eigen::VectorXd px = precision_ * x;
  const double q = x.dot(px);
  Eigen::VectorXd gx(dim_), s(dim_), ds(dim_);
  if (gaussian) {
    gx = x - px;
    for (int j = 0; j < dim_; ++j) {
      s[j] = 1.0 / normal_pdf(x[j]);
      ds[j] = x[j] * s[j] * s[j];
    }
  } else {
    const StudentT t(nu_);
    const double a = (nu_ + dim_) / (nu_ + q);
    for (int j = 0; j < dim_; ++j) {
      const double r = (nu_ + 1.0) * x[j] / (nu_ + x[j] * x[j]);
      gx[j] = -a * px[j] + r;
      s[j] = 1.0 / t.pdf(x[j]);
      ds[j] = r * s[j] * s[j];
    }
  }
  out.gradient = gx.cwiseProduct(s);
  if (order < 2) return out;

  Eigen::MatrixXd hx;
  if (gaussian) {
    hx = Eigen::MatrixXd::Identity(dim_, dim_) - precision_;
  } else {
    const double denom = nu_ + q;
    hx = -(nu_ + dim_) * (precision_ / denom - 2.0 * px * px.transpose() / (denom * denom));
    for (int j = 0; j < dim_; ++j) {
      const double x2 = x[j] * x[j];
      hx(j, j) += (nu_ + 1.0) * (nu_ - x2) / ((nu_ + x2) * (nu_ + x2));
    }
  }
  out.hessian = s.asDiagonal() * hx * s.asDiagonal();
  out.hessian.diagonal() += gx.cwiseProduct(ds);
  return out;
}

double CopulaSpec::archimedean_log_density(double u, double v, double ubar, double vbar) const {
  const double th = theta_;
  switch (family_) {
    case CopulaFamily::Clayton: {
      if (th == 0.0) return 0.0;
      const double lu = -neg_log(u, ubar);
      const double lv = -neg_log(v, vbar);
      const double log_s = log_sum_exp_minus_one(-th * lu, -th * lv);
      return std::log1p(th) - (1.0 + th) * (lu + lv) - (2.0 + 1.0 / th) * log_s;
    }
    case CopulaFamily::Gumbel: {
      const double a = neg_log(u, ubar);
      const double b = neg_log(v, vbar);
      const double la = std::log(a), lb = std::log(b);
      const double m = std::max(la, lb);
      const double log_a_sum = th * m + std::log(std::exp(th * (la - m)) + std::exp(th * (lb - m)));
      const double w = std::exp(log_a_sum / th);
      return -w + a + b + (th - 1.0) * (la + lb) + (1.0 / th - 2.0) * log_a_sum +
             std::log(w + th - 1.0);
    }
    case CopulaFamily::Frank: {
      if (th == 0.0) return 0.0;
      const double em1 = -std::expm1(-th);                 // 1 - e^{-th}
      const double eu = -std::expm1(-th * u);               // 1 - e^{-th u}
      const double ev = -std::expm1(-th * v);
      const double denom = em1 - eu * ev;
      return std::log(th * em1 / (denom * denom)) - th * (u + v);
    }
    default:
      return 0.0;
  }
}

Eigen::Vector2d CopulaSpec::archimedean_gradient(double u, double v, double ubar, double vbar) const {
  const double th = theta_;
  Eigen::Vector2d g;
  if (family_ == CopulaFamily::Clayton) {
    if (th == 0.0) return Eigen::Vector2d::Zero();
    const double lu = -neg_log(u, ubar);
    const double lv = -neg_log(v, vbar);
    const double log_s = log_sum_exp_minus_one(-th * lu, -th * lv);
    g[0] = (-(1.0 + th) + (2.0 * th + 1.0) * std::exp(-th * lu - log_s)) / u;
    g[1] = (-(1.0 + th) + (2.0 * th + 1.0) * std::exp(-th * lv - log_s)) / v;
    return g;
  }
  if (family_ == CopulaFamily::Frank) {
    if (th == 0.0) return Eigen::Vector2d::Zero();
    const double em1 = -std::expm1(-th);
    const double eu = -std::expm1(-th * u);
    const double ev = -std::expm1(-th * v);
    const double denom = em1 - eu * ev;
    g[0] = -th + 2.0 * th * std::exp(-th * u) * ev / denom;
    g[1] = -th + 2.0 * th * std::exp(-th * v) * eu / denom;
    return g;
  }
  // Gumbel: central differences of the log density.
  const double pt[2] = {u, v};
  const double pb[2] = {ubar, vbar};
  for (int j = 0; j < 2; ++j) {
    const double h = fd_step(pt[j], pb[j], 1e-6);
    double up[2] = {u, v}, upb[2] = {ubar, vbar}, dn[2] = {u, v}, dnb[2] = {ubar, vbar};
    up[j] += h; upb[j] -= h;
    dn[j] -= h; dnb[j] += h;
    g[j] = (archimedean_log_density(up[0], up[1], upb[0], upb[1]) -
            archimedean_log_density(dn[0], dn[1], dnb[0], dnb[1])) / (2.0 * h);
  }
  return g;
}

LogDensityDerivatives CopulaSpec::archimedean_derivatives(std::span<const double> u,
                                                          std::span<const double> ubar,
                                                          int order) const {
  LogDensityDerivatives out;
  out.value = archimedean_log_density(u[0], u[1], ubar[0], ubar[1]);
  if (order < 1) return out;
  out.gradient = archimedean_gradient(u[0], u[1], ubar[0], ubar[1]);
  if (order < 2) return out;
  // Central differences of the gradient; a wider step than the gradient itself uses.
  Eigen::Matrix2d h;
  for (int j = 0; j < 2; ++j) {
    const double step = fd_step(u[j], ubar[j], 1e-4);
    double up[2] = {u[0], u[1]}, upb[2] = {ubar[0], ubar[1]};
    double dn[2] = {u[0], u[1]}, dnb[2] = {ubar[0], ubar[1]};
    up[j] += step; upb[j] -= step;
    dn[j] -= step; dnb[j] += step;
    h.col(j) = (archimedean_gradient(up[0], up[1], upb[0], upb[1]) -
                archimedean_gradient(dn[0], dn[1], dnb[0], dnb[1])) / (2.0 * step);
  }
  out.hessian = 0.5 * (h + h.transpose());
  return out;
}

PointMatrix CopulaSpec::sample(std::size_t n, Rng& rng) const {
  if (n < 1) throw ArgumentError("sample_copula: n must be >= 1");
  PointMatrix out(static_cast<Eigen::Index>(n), dim_);
  const auto rows = static_cast<Eigen::Index>(n);
  switch (family_) {
    case CopulaFamily::Independence:
      for (Eigen::Index i = 0; i < rows; ++i)
        for (int j = 0; j < dim_; ++j) out(i, j) = uniform_open(rng);
      break;
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT: {
      const bool gaussian = family_ == CopulaFamily::Gaussian;
      const StudentT t(gaussian ? 1.0 : nu_);
      Eigen::VectorXd z(dim_);
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (int j = 0; j < dim_; ++j) z[j] = standard_normal(rng);
        Eigen::VectorXd x = cholesky_ * z;
        if (gaussian) {
          for (int j = 0; j < dim_; ++j) out(i, j) = clamp_open(normal_cdf(x[j]));
        } else {
          const double w = gamma_variate(rng, 0.5 * nu_, 0.5);
          x /= std::sqrt(w / nu_);
          for (int j = 0; j < dim_; ++j) out(i, j) = clamp_open(t.cdf(x[j]));
        }
      }
      break;
    }
    case CopulaFamily::Clayton:
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (theta_ == 0.0) {
          out(i, 0) = uniform_open(rng);
          out(i, 1) = uniform_open(rng);
          continue;
        }
        // Marshall-Olkin: frailty V ~ Gamma(1/theta), u_j = (1 + E_j / V)^(-1/theta).
        const double v = gamma_variate(rng, 1.0 / theta_, 1.0);
        for (int j = 0; j < 2; ++j) {
          const double e = -std::log(uniform_open(rng));
          out(i, j) = clamp_open(std::exp(-std::log1p(e / v) / theta_));
        }
      }
      break;
    case CopulaFamily::Gumbel: {
      const double alpha = 1.0 / theta_;
      for (Eigen::Index i = 0; i < rows; ++i) {
        double v = 1.0;
        if (alpha < 1.0) {
          // Positive stable frailty with Laplace transform exp(-s^alpha) (Kanter).
          const double w = kPi * uniform_open(rng);
          const double e = -std::log(uniform_open(rng));
          v = std::sin(alpha * w) / std::pow(std::sin(w), 1.0 / alpha) *
              std::pow(std::sin((1.0 - alpha) * w) / e, (1.0 - alpha) / alpha);
        }
        for (int j = 0; j < 2; ++j) {
          const double e = -std::log(uniform_open(rng));
          out(i, j) = clamp_open(std::exp(-std::pow(e / v, alpha)));
        }
      }
      break;
    }
    case CopulaFamily::Frank:
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double u = uniform_open(rng);
        const double w = uniform_open(rng);
        out(i, 0) = u;
        if (theta_ == 0.0) {
          out(i, 1) = w;
          continue;
        }
        // Conditional inversion of dC/du.
        const double a = std::exp(-theta_ * u);
        const double v = -std::log1p(w * std::expm1(-theta_) / (w + (1.0 - w) * a)) / theta_;
        out(i, 1) = clamp_open(v);
      }
      break;
  }
  return out;
}

double CopulaSpec::kendall_tau() const {
  switch (family_) {
    case CopulaFamily::Independence: return 0.0;
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT: return rho_to_tau(correlation_(0, 1));
    default: return archimedean_param_to_tau(family_, theta_);
  }
}

std::string CopulaSpec::describe() const {
  std::ostringstream os;
  os << to_string(family_) << "(d=" << dim_;
  if (is_elliptical()) {
    if (dim_ == 2) os << ", rho=" << correlation_(0, 1);
    if (family_ == CopulaFamily::StudentT) os << ", nu=" << nu_;
  } else if (family_ != CopulaFamily::Independence) {
    os << ", theta=" << theta_;
  }
  os << ")";
  return os.str();
}

double rho_to_tau(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("rho_to_tau: rho must lie in (-1,1)");
  return 2.0 * std::asin(rho) / kPi;
}

double tau_to_rho(double tau) {
  if (!(tau > -1.0 && tau < 1.0)) throw DomainError("tau_to_rho: tau must lie in (-1,1)");
  return std::sin(0.5 * kPi * tau);
}

double archimedean_param_to_tau(CopulaFamily family, double parameter) {
  switch (family) {
    case CopulaFamily::Clayton:
      if (!(parameter >= 0.0)) throw DomainError("clayton theta must be >= 0");
      return parameter / (parameter + 2.0);
    case CopulaFamily::Gumbel:
      if (!(parameter >= 1.0)) throw DomainError("gumbel theta must be >= 1");
      return 1.0 - 1.0 / parameter;
    case CopulaFamily::Frank:
      if (!std::isfinite(parameter)) throw DomainError("frank theta must be finite");
      if (parameter == 0.0) return 0.0;
      return 1.0 - 4.0 / parameter * (1.0 - debye1(parameter));
    default:
      throw ArgumentError("archimedean_param_to_tau: not an Archimedean family");
  }
}

double tau_to_archimedean_param(CopulaFamily family, double tau) {
  switch (family) {
    case CopulaFamily::Clayton:
      if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("clayton tau must lie in [0,1)");
      return 2.0 * tau / (1.0 - tau);
    case CopulaFamily::Gumbel:
      if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("gumbel tau must lie in [0,1)");
      return 1.0 / (1.0 - tau);
    case CopulaFamily::Frank: {
      if (!(tau > -1.0 && tau < 1.0)) throw DomainError("frank tau must lie in (-1,1)");
      if (tau == 0.0) return 0.0;
      auto f = [tau](double th) { return archimedean_param_to_tau(CopulaFamily::Frank, th) - tau; };
      double lo = tau > 0 ? 1e-8 : -700.0, hi = tau > 0 ? 700.0 : -1e-8;
      boost::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
      return 0.5 * (r.first + r.second);
    }
    default:
      throw ArgumentError("tau_to_archimedean_param: not an Archimedean family");
  }
}

}  // namespace copula_lab
