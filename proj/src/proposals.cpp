#include "copula_lab/proposals.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "copula_lab/errors.hpp"
#include "copula_lab/mode.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

BetaProductProposal::BetaProductProposal(std::vector<MarginalPrior> betas) : betas_(std::move(betas)) {
  for (const auto& b : betas_)
    if (b.family() != MarginalFamily::Beta) throw ArgumentError("BetaProductProposal: components must be Beta");
}

PointMatrix BetaProductProposal::sample(std::size_t n, Rng& rng) const {
  PointMatrix out(static_cast<Eigen::Index>(n), dim());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (int j = 0; j < dim(); ++j) {
      double z = betas_[static_cast<std::size_t>(j)].sample(rng);
      // Keep draws strictly inside (0,1) when a gamma ratio rounds.
      z = std::clamp(z, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
      out(i, j) = z;
    }
  return out;
}

double BetaProductProposal::log_pdf(std::span<const double> theta) const {
  double total = 0.0;
  for (std::size_t j = 0; j < betas_.size(); ++j) total += betas_[j].log_pdf(theta[j]);
  return total;
}

std::string BetaProductProposal::describe() const {
  std::ostringstream os;
  os << "beta_product[";
  for (std::size_t j = 0; j < betas_.size(); ++j) os << (j ? ", " : "") << betas_[j].describe();
  os << "]";
  return os.str();
}

EllipticalProposal::EllipticalProposal(Eigen::VectorXd location, Eigen::MatrixXd scale, double nu)
    : location_(std::move(location)), scale_(std::move(scale)), nu_(nu) {
  if (scale_.rows() != location_.size() || scale_.cols() != location_.size())
    throw ArgumentError("EllipticalProposal: scale matrix has the wrong size");
  if (nu_ < 0.0) throw ParameterError("EllipticalProposal: nu must be >= 0");
  Eigen::LLT<Eigen::MatrixXd> llt(scale_);
  if (llt.info() != Eigen::Success) throw ParameterError("EllipticalProposal: scale matrix is not positive definite");
  chol_ = llt.matrixL();
  const double d = static_cast<double>(location_.size());
  const double log_det = 2.0 * chol_.diagonal().array().log().sum();
  if (nu_ == 0.0) {
    log_const_ = -d * kLogSqrt2Pi - 0.5 * log_det;
  } else {
    log_const_ = log_gamma(0.5 * (nu_ + d)) - log_gamma(0.5 * nu_) - 0.5 * d * std::log(nu_ * kPi) - 0.5 * log_det;
  }
}

PointMatrix EllipticalProposal::sample(std::size_t n, Rng& rng) const {
  const int d = dim();
  PointMatrix out(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < d; ++j) z[j] = standard_normal(rng);
    Eigen::VectorXd x = chol_ * z;
    if (nu_ > 0.0) x /= std::sqrt(gamma_variate(rng, 0.5 * nu_, 0.5) / nu_);
    out.row(i) = (location_ + x).transpose();
  }
  return out;
}

double EllipticalProposal::log_pdf(std::span<const double> theta) const {
  const Eigen::Map<const Eigen::VectorXd> x(theta.data(), dim());
  const Eigen::VectorXd r = chol_.triangularView<Eigen::Lower>().solve(x - location_);
  const double q = r.squaredNorm();
  if (nu_ == 0.0) return log_const_ - 0.5 * q;
  return log_const_ - 0.5 * (nu_ + dim()) * std::log1p(q / nu_);
}

std::string EllipticalProposal::describe() const {
  std::ostringstream os;
  os << (nu_ == 0.0 ? "normal" : "student_t") << "(location=[";
  for (Eigen::Index j = 0; j < location_.size(); ++j) os << (j ? ", " : "") << location_[j];
  os << "]";
  if (nu_ > 0.0) os << ", nu=" << nu_;
  os << ")";
  return os.str();
}

std::unique_ptr<Proposal> conjugate_proposal(const ModelSpec& model, const std::vector<MarginalPrior>& marginals,
                                             const Dataset& data) {
  if (static_cast<int>(marginals.size()) != model.dim()) throw ArgumentError("conjugate_proposal: wrong number of marginals");
  if (model.kind == ModelKind::MultinomialConditional) {
    std::vector<MarginalPrior> post;
    std::int64_t later = 0;
    for (std::size_t v = data.counts.size(); v-- > 0;) {
      if (v < marginals.size()) {
        const auto& m = marginals[v];
        if (m.family() != MarginalFamily::Beta) throw ArgumentError("conjugate_proposal: multinomial needs Beta marginals");
        post.push_back(MarginalPrior::beta(m.first() + static_cast<double>(data.counts[v]),
                                           m.second() + static_cast<double>(later)));
      }
      later += data.counts[v];
    }
    std::reverse(post.begin(), post.end());
    return std::make_unique<BetaProductProposal>(std::move(post));
  }
  if (model.kind == ModelKind::LinRegKnownVar) {
    const int p = model.dim();
    Eigen::MatrixXd precision = data.xtx / model.noise_variance;
    Eigen::VectorXd linear = data.xty / model.noise_variance;
    for (int j = 0; j < p; ++j) {
      const auto& m = marginals[static_cast<std::size_t>(j)];
      if (m.family() != MarginalFamily::Normal) throw ArgumentError("conjugate_proposal: regression needs Normal marginals");
      precision(j, j) += 1.0 / m.second();
      linear[j] += m.first() / m.second();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    Eigen::VectorXd mean = llt.solve(linear);
    Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(p, p));
    cov = 0.5 * (cov + cov.transpose());
    return std::make_unique<EllipticalProposal>(std::move(mean), std::move(cov), 0.0);
  }
  throw ArgumentError("conjugate_proposal: no conjugate pairing for model " + to_string(model.kind));
}

std::unique_ptr<EllipticalProposal> laplace_proposal(const ModelSpec& model, const std::vector<MarginalPrior>& marginals,
                                                     const Dataset& data, double nu, double inflation) {
  if (static_cast<int>(marginals.size()) != model.dim()) throw ArgumentError("laplace_proposal: wrong number of marginals");
  if (!(inflation > 0.0)) throw ArgumentError("laplace_proposal: inflation must be positive");
  const int d = model.dim();
  auto target = [&](const Eigen::VectorXd& theta, int order) {
    const std::span<const double> t(theta.data(), static_cast<std::size_t>(d));
    LogDensityDerivatives out;
    bool inside = model.in_interior(t);
    for (int j = 0; j < d && inside; ++j) inside = marginals[static_cast<std::size_t>(j)].in_support(theta[j]);
    if (!inside) {
      out.value = -std::numeric_limits<double>::infinity();
      return out;
    }
    out = log_likelihood_derivatives(model, t, data, order);
    for (int j = 0; j < d; ++j) {
      const auto& m = marginals[static_cast<std::size_t>(j)];
      out.value += m.log_pdf(theta[j]);
      if (order >= 1) out.gradient[j] += m.d_log_pdf(theta[j]);
      if (order >= 2) out.hessian(j, j) += m.d2_log_pdf(theta[j]);
    }
    return out;
  };
  Eigen::VectorXd start(d);
  for (int j = 0; j < d; ++j) start[j] = marginals[static_cast<std::size_t>(j)].mean();
  const ModeResult mode = posterior_mode(target, start);
  Eigen::MatrixXd scale = (-mode.hessian).inverse() * inflation;
  scale = 0.5 * (scale + scale.transpose());
  return std::make_unique<EllipticalProposal>(mode.theta, std::move(scale), nu);
}

}  // namespace copula_lab
