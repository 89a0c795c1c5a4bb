#include "copula_lab/mode.hpp"

#include <cmath>
#include <deque>
#include <sstream>

#include "copula_lab/errors.hpp"

namespace copula_lab {

namespace {

double scaled_gradient(const Eigen::VectorXd& g, const Eigen::MatrixXd& h) {
  return g.cwiseAbs().maxCoeff() / std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
}

std::string trace_text(const std::deque<std::string>& trace) {
  std::ostringstream os;
  for (const auto& t : trace) os << "\n  " << t;
  return os.str();
}

}  // namespace

ModeResult posterior_mode(const LogTarget& target, Eigen::VectorXd start, const ModeOptions& options) {
  LogDensityDerivatives cur = target(start, 2);
  if (!std::isfinite(cur.value)) throw DomainError("posterior_mode: start lies outside the target's domain");
  Eigen::VectorXd x = std::move(start);
  std::deque<std::string> trace;
  const auto d = x.size();

  for (int it = 0; it < options.max_iterations; ++it) {
    const double sg = scaled_gradient(cur.gradient, cur.hessian);
    {
      std::ostringstream os;
      os << "iter " << it << ": f=" << cur.value << " scaled|g|=" << sg << " x=" << x.transpose();
      trace.push_back(os.str());
      if (trace.size() > 5) trace.pop_front();
    }
    if (sg < options.tolerance) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cur.hessian);
      if (eig.eigenvalues().maxCoeff() >= 0.0)
        throw ConvergenceError("posterior_mode: stationary point is not a strict local maximum" + trace_text(trace));
      return {x, cur.value, cur.gradient, cur.hessian, it};
    }

    // Newton direction on a negative-definite modification of the Hessian.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cur.hessian);
    Eigen::VectorXd lam = eig.eigenvalues();
    const double floor = 1e-8 * std::max(1.0, lam.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < d; ++k) lam[k] = -std::max(std::abs(lam[k]), floor);
    const Eigen::MatrixXd& v = eig.eigenvectors();
    Eigen::VectorXd step = -(v * (v.transpose() * cur.gradient).cwiseQuotient(lam));

    bool moved = false;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd trial = x + step;
      if (trial == x) break;  // step below rounding: no further progress possible
      LogDensityDerivatives next = target(trial, 2);
      if (std::isfinite(next.value) && next.value > cur.value && next.gradient.allFinite()) {
        x = trial;
        cur = std::move(next);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // The objective is flat at working precision; accept if the gradient is small.
      if (sg < 1e3 * options.tolerance) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fin(cur.hessian);
        if (fin.eigenvalues().maxCoeff() < 0.0) return {x, cur.value, cur.gradient, cur.hessian, it};
      }
      throw ConvergenceError("posterior_mode: line search failed" + trace_text(trace));
    }
  }
  throw ConvergenceError("posterior_mode: no convergence in " + std::to_string(options.max_iterations) +
                         " iterations" + trace_text(trace));
}

Eigen::VectorXd one_step_newton_mode(const Eigen::VectorXd& mode1, const Eigen::MatrixXd& observed_info,
                                     const CopulaSpec& c1, const CopulaSpec& c2,
                                     const std::vector<MarginalPrior>& marginals) {
  const auto d = mode1.size();
  if (observed_info.rows() != d || observed_info.cols() != d || static_cast<Eigen::Index>(marginals.size()) != d ||
      c1.dim() != d || c2.dim() != d)
    throw ArgumentError("one_step_newton_mode: dimension mismatch");
  std::vector<double> u(static_cast<std::size_t>(d)), ubar(u.size());
  Eigen::VectorXd f(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& m = marginals[static_cast<std::size_t>(j)];
    m.tails(mode1[j], u[static_cast<std::size_t>(j)], ubar[static_cast<std::size_t>(j)]);
    f[j] = m.pdf(mode1[j]);
  }
  const Eigen::VectorXd g1 = c1.log_density_derivatives(u, ubar, 1).gradient;
  const Eigen::VectorXd g2 = c2.log_density_derivatives(u, ubar, 1).gradient;
  const Eigen::VectorXd grad_theta = (g1 - g2).cwiseProduct(f);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(observed_info);
  if (!lu.isInvertible()) throw SingularMatrixError("one_step_newton_mode: observed information is singular", 0.0);
  return mode1 - lu.solve(grad_theta);
}

}  // namespace copula_lab
