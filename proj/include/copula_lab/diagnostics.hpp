#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "copula_lab/copula_prior.hpp"
#include "copula_lab/dvine.hpp"
#include "copula_lab/kernels.hpp"
#include "copula_lab/model.hpp"

namespace copula_lab {

/// Partial correlation of (a, b) given `given`, read off the inverse of the matching
/// principal submatrix of sigma.
double partial_correlation(const Eigen::MatrixXd& sigma, int a, int b, const std::vector<int>& given);

/// Edge taus of the Gaussian copula with covariance sigma, in vine edge order.
struct InducedTauStructure {
  std::vector<std::string> labels;
  std::vector<double> tau;
};

/// Throws ParameterError unless sigma is symmetric positive definite.
InducedTauStructure induced_tau(const Eigen::MatrixXd& sigma, const DVine& vine);

struct RejectionVerdict {
  bool chronically_rejected = true;
  /// min over probes of max over edges |tau_prior - tau(theta0)|.
  double worst_case_gap = 0.0;
  Eigen::VectorXd nearest_theta;
  std::vector<double> nearest_tau;
  std::size_t probes = 0;
  double tolerance = 0.0;
};

/// Probe points drawn from a design prior.
std::vector<Eigen::VectorXd> probes_from_prior(const CopulaPrior& design, std::size_t count, Rng& rng);
/// Regular grid over the box [lower, upper], `per_axis` points per coordinate (endpoints included).
std::vector<Eigen::VectorXd> probes_on_grid(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int per_axis);

/// Compares the prior vine taus with the limiting taus implied by inverse_fisher(model, theta0)
/// at every probe. Not rejected iff some probe matches every edge within tol.
/// Probes outside the model interior raise DomainError; an empty probe set raises ArgumentError.
RejectionVerdict chronic_rejection_check(const DVine& prior_vine, const ModelSpec& model,
                                         const std::vector<Eigen::VectorXd>& probes, double tol,
                                         Execution exec = Execution::Parallel);

}  // namespace copula_lab
