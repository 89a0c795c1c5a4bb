#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "copula_lab/copula.hpp"
#include "copula_lab/marginal.hpp"

namespace copula_lab {

/// Log target with derivatives up to `order`; value -inf outside the domain.
using LogTarget = std::function<LogDensityDerivatives(const Eigen::VectorXd& theta, int order)>;

struct ModeOptions {
  /// Convergence on max|g| / max(1, max|diag H|).
  double tolerance = 1e-10;
  int max_iterations = 200;
};

struct ModeResult {
  Eigen::VectorXd theta;
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  int iterations = 0;
};

/// Damped Newton ascent. Indefinite Hessians are replaced by their negated absolute
/// eigen-decomposition and steps are halved until the objective increases.
/// Throws ConvergenceError (message carries the last iterates) after max_iterations, and
/// when the stationary point found is not a strict local maximum.
ModeResult posterior_mode(const LogTarget& target, Eigen::VectorXd start, const ModeOptions& options = {});

/// One Newton step from the prior-1 mode towards the prior-2 mode:
///   mode1 - J^{-1} grad_theta [log c1(u) - log c2(u)],  u_j = F_j(theta_j),
/// with grad_theta = f_j(theta_j) * grad_u. J is the observed information of posterior 1 at mode1.
/// Throws SingularMatrixError when J is singular.
Eigen::VectorXd one_step_newton_mode(const Eigen::VectorXd& mode1, const Eigen::MatrixXd& observed_info,
                                     const CopulaSpec& c1, const CopulaSpec& c2,
                                     const std::vector<MarginalPrior>& marginals);

}  // namespace copula_lab
