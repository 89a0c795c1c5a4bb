#include "copula_lab/beta_fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

namespace copula_lab {

namespace {

Eigen::Vector3d residuals(const Eigen::Vector2d& logp, const Eigen::Vector3d& q) {
  const double a = std::exp(logp[0]), b = std::exp(logp[1]);
  Eigen::Vector3d r;
  for (int k = 0; k < 3; ++k) r[k] = boost::math::ibeta(a, b, q[k]) - 0.25 * (k + 1);
  return r;
}

Eigen::Matrix<double, 3, 2> jacobian(const Eigen::Vector2d& logp, const Eigen::Vector3d& q) {
  Eigen::Matrix<double, 3, 2> j;
  constexpr double h = 1e-6;
  for (int c = 0; c < 2; ++c) {
    Eigen::Vector2d up = logp, dn = logp;
    up[c] += h;
    dn[c] -= h;
    j.col(c) = (residuals(up, q) - residuals(dn, q)) / (2.0 * h);
  }
  return j;
}

}  // namespace

BetaFit fit_beta_from_quartiles(double q25, double q50, double q75) {
  if (!(0.0 < q25 && q25 < q50 && q50 < q75 && q75 < 1.0))
    throw ArgumentError("fit_beta_from_quartiles: need 0 < q25 < q50 < q75 < 1");
  const Eigen::Vector3d q(q25, q50, q75);

  // Moment match: mean ~ median, sd ~ IQR / 1.349.
  const double m = q50;
  const double sd = (q75 - q25) / 1.349;
  const double total = std::max(m * (1.0 - m) / (sd * sd) - 1.0, 0.5);
  Eigen::Vector2d x(std::log(m * total), std::log((1.0 - m) * total));

  Eigen::Vector3d r = residuals(x, q);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  BetaFit best{std::exp(x[0]), std::exp(x[1]), cost, 0};

  for (int it = 1; it <= 500; ++it) {
    const auto j = jacobian(x, q);
    const Eigen::Vector2d grad = j.transpose() * r;
    best.iterations = it;
    if (grad.norm() < 1e-10) return best;
    const Eigen::Matrix2d jtj = j.transpose() * j;
    bool improved = false;
    while (lambda < 1e16) {
      Eigen::Matrix2d lhs = jtj;
      lhs.diagonal() *= 1.0 + lambda;
      const Eigen::Vector2d step = lhs.ldlt().solve(-grad);
      const Eigen::Vector2d trial = x + step;
      const Eigen::Vector3d rt = residuals(trial, q);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        x = trial;
        r = rt;
        cost = ct;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    best = {std::exp(x[0]), std::exp(x[1]), cost, it};
    if (!improved) {
      // No descent step exists at working precision: accept a numerically flat point.
      if (grad.norm() < 1e-8) return best;
      throw BetaFitError("fit_beta_from_quartiles: optimizer stalled", best);
    }
  }
  throw BetaFitError("fit_beta_from_quartiles: iteration limit reached", best);
}

}  // namespace copula_lab
