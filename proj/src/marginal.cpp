#include "copula_lab/marginal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "copula_lab/errors.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive and finite");
}

}  // namespace

std::string to_string(MarginalFamily family) {
  switch (family) {
    case MarginalFamily::Beta: return "beta";
    case MarginalFamily::Gamma: return "gamma";
    case MarginalFamily::Normal: return "normal";
  }
  return "unknown";
}

MarginalPrior::MarginalPrior(MarginalFamily family, double p1, double p2)
    : family_(family), p1_(p1), p2_(p2), log_norm_(0.0) {
  switch (family_) {
    case MarginalFamily::Beta:
      log_norm_ = log_gamma(p1 + p2) - log_gamma(p1) - log_gamma(p2);
      break;
    case MarginalFamily::Gamma:
      log_norm_ = p1 * std::log(p2) - log_gamma(p1);
      break;
    case MarginalFamily::Normal:
      log_norm_ = -kLogSqrt2Pi - 0.5 * std::log(p2);
      break;
  }
}

MarginalPrior MarginalPrior::beta(double a, double b) {
  require_positive(a, "beta a");
  require_positive(b, "beta b");
  return {MarginalFamily::Beta, a, b};
}

MarginalPrior MarginalPrior::gamma(double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  return {MarginalFamily::Gamma, shape, rate};
}

MarginalPrior MarginalPrior::normal(double mean, double variance) {
  if (!std::isfinite(mean)) throw ParameterError("normal mean must be finite");
  require_positive(variance, "normal variance");
  return {MarginalFamily::Normal, mean, variance};
}

bool MarginalPrior::in_support(double x) const {
  switch (family_) {
    case MarginalFamily::Beta: return x > 0.0 && x < 1.0;
    case MarginalFamily::Gamma: return x > 0.0 && std::isfinite(x);
    case MarginalFamily::Normal: return std::isfinite(x);
  }
  return false;
}

double MarginalPrior::log_pdf(double x) const {
  if (!in_support(x)) return kNegInf;
  switch (family_) {
    case MarginalFamily::Beta:
      return log_norm_ + (p1_ - 1.0) * std::log(x) + (p2_ - 1.0) * std::log1p(-x);
    case MarginalFamily::Gamma:
      return log_norm_ + (p1_ - 1.0) * std::log(x) - p2_ * x;
    case MarginalFamily::Normal: {
      const double z = x - p1_;
      return log_norm_ - 0.5 * z * z / p2_;
    }
  }
  return kNegInf;
}

double MarginalPrior::pdf(double x) const { return std::exp(log_pdf(x)); }

double MarginalPrior::d_log_pdf(double x) const {
  switch (family_) {
    case MarginalFamily::Beta: return (p1_ - 1.0) / x - (p2_ - 1.0) / (1.0 - x);
    case MarginalFamily::Gamma: return (p1_ - 1.0) / x - p2_;
    case MarginalFamily::Normal: return -(x - p1_) / p2_;
  }
  return 0.0;
}

double MarginalPrior::d2_log_pdf(double x) const {
  switch (family_) {
    case MarginalFamily::Beta: return -(p1_ - 1.0) / (x * x) - (p2_ - 1.0) / ((1.0 - x) * (1.0 - x));
    case MarginalFamily::Gamma: return -(p1_ - 1.0) / (x * x);
    case MarginalFamily::Normal: return -1.0 / p2_;
  }
  return 0.0;
}

double MarginalPrior::cdf(double x) const {
  switch (family_) {
    case MarginalFamily::Beta:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return boost::math::ibeta(p1_, p2_, x);
    case MarginalFamily::Gamma:
      if (x <= 0.0) return 0.0;
      return boost::math::gamma_p(p1_, p2_ * x);
    case MarginalFamily::Normal:
      return normal_cdf((x - p1_) / std::sqrt(p2_));
  }
  return 0.0;
}

double MarginalPrior::sf(double x) const {
  switch (family_) {
    case MarginalFamily::Beta:
      if (x <= 0.0) return 1.0;
      if (x >= 1.0) return 0.0;
      return boost::math::ibetac(p1_, p2_, x);
    case MarginalFamily::Gamma:
      if (x <= 0.0) return 1.0;
      return boost::math::gamma_q(p1_, p2_ * x);
    case MarginalFamily::Normal:
      return normal_sf((x - p1_) / std::sqrt(p2_));
  }
  return 0.0;
}

double MarginalPrior::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("marginal quantile: p must lie in (0,1)");
  switch (family_) {
    case MarginalFamily::Beta: return boost::math::ibeta_inv(p1_, p2_, p);
    case MarginalFamily::Gamma: return boost::math::gamma_p_inv(p1_, p) / p2_;
    case MarginalFamily::Normal: return p1_ + std::sqrt(p2_) * normal_quantile(p);
  }
  return 0.0;
}

void MarginalPrior::tails(double x, double& u, double& ubar) const {
  if (x <= mean()) {
    u = cdf(x);
    ubar = 1.0 - u;
  } else {
    ubar = sf(x);
    u = 1.0 - ubar;
  }
}

double MarginalPrior::mean() const {
  switch (family_) {
    case MarginalFamily::Beta: return p1_ / (p1_ + p2_);
    case MarginalFamily::Gamma: return p1_ / p2_;
    case MarginalFamily::Normal: return p1_;
  }
  return 0.0;
}

double MarginalPrior::variance() const {
  switch (family_) {
    case MarginalFamily::Beta: {
      const double s = p1_ + p2_;
      return p1_ * p2_ / (s * s * (s + 1.0));
    }
    case MarginalFamily::Gamma: return p1_ / (p2_ * p2_);
    case MarginalFamily::Normal: return p2_;
  }
  return 0.0;
}

double MarginalPrior::sample(Rng& rng) const {
  switch (family_) {
    case MarginalFamily::Beta: return beta_variate(rng, p1_, p2_);
    case MarginalFamily::Gamma: return gamma_variate(rng, p1_, p2_);
    case MarginalFamily::Normal: return p1_ + std::sqrt(p2_) * standard_normal(rng);
  }
  return 0.0;
}

std::string MarginalPrior::describe() const {
  std::ostringstream os;
  os << to_string(family_) << "(" << p1_ << ", " << p2_ << ")";
  return os.str();
}

}  // namespace copula_lab
