#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "copula_lab/copula_prior.hpp"
#include "copula_lab/model.hpp"
#include "copula_lab/rng.hpp"

namespace copula_lab {

/// Sampling distribution for importance resampling.
class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual int dim() const = 0;
  virtual PointMatrix sample(std::size_t n, Rng& rng) const = 0;
  virtual double log_pdf(std::span<const double> theta) const = 0;
  virtual std::string describe() const = 0;
};

/// Independent Beta(a_j, b_j) coordinates.
class BetaProductProposal : public Proposal {
 public:
  explicit BetaProductProposal(std::vector<MarginalPrior> betas);
  int dim() const override { return static_cast<int>(betas_.size()); }
  PointMatrix sample(std::size_t n, Rng& rng) const override;
  double log_pdf(std::span<const double> theta) const override;
  std::string describe() const override;
  const std::vector<MarginalPrior>& components() const { return betas_; }

 private:
  std::vector<MarginalPrior> betas_;
};

/// Multivariate normal (nu = 0) or Student t with nu > 0 degrees of freedom.
class EllipticalProposal : public Proposal {
 public:
  EllipticalProposal(Eigen::VectorXd location, Eigen::MatrixXd scale, double nu);
  int dim() const override { return static_cast<int>(location_.size()); }
  PointMatrix sample(std::size_t n, Rng& rng) const override;
  double log_pdf(std::span<const double> theta) const override;
  std::string describe() const override;
  const Eigen::VectorXd& location() const { return location_; }
  const Eigen::MatrixXd& scale() const { return scale_; }
  double nu() const { return nu_; }

 private:
  Eigen::VectorXd location_;
  Eigen::MatrixXd scale_;
  Eigen::MatrixXd chol_;
  double nu_;
  double log_const_;
};

/// Exact posterior under independently joined marginals:
///   multinomial with Beta marginals -> Beta(a_v + n_v, b_v + sum_{t>v} n_t) per coordinate;
///   regression with Normal marginals -> Normal with precision D^{-1} + X'X / s2.
/// Other pairings raise ArgumentError.
std::unique_ptr<Proposal> conjugate_proposal(const ModelSpec& model, const std::vector<MarginalPrior>& marginals,
                                             const Dataset& data);

/// Multivariate t (default nu = 5) at the mode of likelihood x independent marginals, with
/// scale matrix inflation * (-Hessian)^{-1} at that mode. Used for the gamma model.
std::unique_ptr<EllipticalProposal> laplace_proposal(const ModelSpec& model, const std::vector<MarginalPrior>& marginals,
                                                     const Dataset& data, double nu = 5.0, double inflation = 1.5);

}  // namespace copula_lab
