#include "copula_lab/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "copula_lab/errors.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

namespace {

void require_interior(const ModelSpec& model, std::span<const double> theta0) {
  if (!model.in_interior(theta0)) throw DomainError("Fisher information needs an interior theta0");
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& m, const char* what) {
  const double cond = condition_number(m);
  if (!(cond < 1e12)) throw SingularMatrixError(what, cond);
  return m.inverse();
}

// Finite-difference step that keeps theta +- h inside the interior.
double fd_step(const ModelSpec& model, double t, double base) {
  double h = base * std::max(1.0, std::abs(t));
  if (model.kind == ModelKind::MultinomialConditional) h = std::min(h, 0.25 * std::min(t, 1.0 - t));
  else if (model.kind != ModelKind::LinRegKnownVar && t > 0.0) h = std::min(h, 0.25 * t);
  return h;
}

Eigen::VectorXd fd_score(const ModelSpec& model, const std::vector<double>& theta, const Dataset& obs) {
  const auto d = static_cast<Eigen::Index>(theta.size());
  Eigen::VectorXd g(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = fd_step(model, theta[static_cast<std::size_t>(j)], 1e-5);
    auto up = theta, dn = theta;
    up[static_cast<std::size_t>(j)] += h;
    dn[static_cast<std::size_t>(j)] -= h;
    g[j] = (log_likelihood(model, up, obs) - log_likelihood(model, dn, obs)) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const ModelSpec& model, const std::vector<double>& theta, const Dataset& obs) {
  const auto d = static_cast<Eigen::Index>(theta.size());
  Eigen::MatrixXd h(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double hj = fd_step(model, theta[static_cast<std::size_t>(j)], 1e-4);
    auto up = theta, dn = theta;
    up[static_cast<std::size_t>(j)] += hj;
    dn[static_cast<std::size_t>(j)] -= hj;
    h.col(j) = (fd_score(model, up, obs) - fd_score(model, dn, obs)) / (2.0 * hj);
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace

Eigen::MatrixXd fisher_information(const ModelSpec& model, std::span<const double> theta0) {
  require_interior(model, theta0);
  const int d = model.dim();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
  switch (model.kind) {
    case ModelKind::MultinomialConditional: {
      double reach = 1.0;  // Pr(an observation is not assigned before category v)
      for (int v = 0; v < d; ++v) {
        const double z = theta0[static_cast<std::size_t>(v)];
        info(v, v) = reach / (z * (1.0 - z));
        reach *= 1.0 - z;
      }
      break;
    }
    case ModelKind::NormalMeanVar: {
      const double s2 = theta0[1];
      info(0, 0) = 1.0 / s2;
      info(1, 1) = 0.5 / (s2 * s2);
      break;
    }
    case ModelKind::GammaShapeRate: {
      const double a = theta0[0], b = theta0[1];
      info << trigamma(a), -1.0 / b, -1.0 / b, a / (b * b);
      break;
    }
    case ModelKind::LinRegKnownVar:
      info = Eigen::MatrixXd::Identity(d, d) / model.noise_variance;
      break;
    case ModelKind::ExpPairCopula:
      throw ArgumentError("the exponential pair model has no closed-form Fisher information");
  }
  return info;
}

Eigen::MatrixXd inverse_fisher(const ModelSpec& model, std::span<const double> theta0) {
  require_interior(model, theta0);
  const int d = model.dim();
  switch (model.kind) {
    case ModelKind::MultinomialConditional: {
      Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(d, d);
      double reach = 1.0;
      for (int v = 0; v < d; ++v) {
        const double z = theta0[static_cast<std::size_t>(v)];
        inv(v, v) = z * (1.0 - z) / reach;
        reach *= 1.0 - z;
      }
      return inv;
    }
    case ModelKind::NormalMeanVar: {
      const double s2 = theta0[1];
      Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(2, 2);
      inv(0, 0) = s2;
      inv(1, 1) = 2.0 * s2 * s2;
      return inv;
    }
    case ModelKind::GammaShapeRate:
      return checked_inverse(fisher_information(model, theta0), "gamma Fisher information is singular");
    case ModelKind::LinRegKnownVar:
      return Eigen::MatrixXd::Identity(d, d) * model.noise_variance;
    case ModelKind::ExpPairCopula: {
      Rng rng(0x5eedULL);
      return numeric_fisher_oracle(model, theta0, FisherMethod::ScoreCovariance, 200000, rng).inverse;
    }
  }
  throw ArgumentError("inverse_fisher: unknown model");
}

Eigen::MatrixXd covariance_to_correlation(const Eigen::MatrixXd& cov) {
  const Eigen::VectorXd s = cov.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = s.asDiagonal() * cov * s.asDiagonal();
  r.diagonal().setOnes();
  return r;
}

double gamma_implied_correlation(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("gamma_implied_correlation: alpha must be positive");
  return 1.0 / std::sqrt(alpha * trigamma(alpha));
}

NumericFisher numeric_fisher_oracle(const ModelSpec& model, std::span<const double> theta0, FisherMethod method,
                                    std::int64_t draws, Rng& rng) {
  require_interior(model, theta0);
  if (draws < 2) throw ArgumentError("numeric_fisher_oracle: need at least 2 draws");
  const int d = model.dim();
  const int dd = d * d;
  const std::vector<double> theta(theta0.begin(), theta0.end());

  // Running moments of vec(T_i), T_i the per-observation information term.
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dd);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(dd, dd);
  for (std::int64_t i = 0; i < draws; ++i) {
    const Dataset obs = generate_data(model, theta0, 1, rng);
    Eigen::MatrixXd term;
    if (method == FisherMethod::ScoreCovariance) {
      const Eigen::VectorXd g = fd_score(model, theta, obs);
      term = g * g.transpose();
    } else {
      term = -fd_hessian(model, theta, obs);
    }
    const Eigen::Map<const Eigen::VectorXd> v(term.data(), dd);
    sum += v;
    cross.noalias() += v * v.transpose();
  }
  const auto n = static_cast<double>(draws);
  const Eigen::VectorXd mean = sum / n;
  const Eigen::MatrixXd cov = (cross / n - mean * mean.transpose()) * (n / (n - 1.0));

  NumericFisher out;
  out.draws = draws;
  out.information = Eigen::Map<const Eigen::MatrixXd>(mean.data(), d, d);
  out.information_se.resize(d, d);
  for (int k = 0; k < dd; ++k) out.information_se.data()[k] = std::sqrt(std::max(cov(k, k), 0.0) / n);
  out.condition = condition_number(out.information);
  if (!(out.condition < 1e12)) throw SingularMatrixError("numeric Fisher estimate is near singular", out.condition);
  out.inverse = out.information.inverse();

  // Delta method: d(I^{-1}) = -I^{-1} dI I^{-1}, so each inverse entry is linear in vec(T).
  const Eigen::MatrixXd& a = out.inverse;
  out.inverse_se.resize(d, d);
  Eigen::VectorXd c(dd);
  for (int r = 0; r < d; ++r) {
    for (int s = 0; s < d; ++s) {
      for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k) c[k + l * d] = -a(r, k) * a(l, s);
      out.inverse_se(r, s) = std::sqrt(std::max(c.dot(cov * c), 0.0) / n);
    }
  }
  return out;
}

}  // namespace copula_lab
