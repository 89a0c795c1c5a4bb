#include "copula_lab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copula_lab/copula.hpp"
#include "copula_lab/errors.hpp"
#include "copula_lab/fisher.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

double partial_correlation(const Eigen::MatrixXd& sigma, int a, int b, const std::vector<int>& given) {
  std::vector<int> idx{a, b};
  idx.insert(idx.end(), given.begin(), given.end());
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = sigma(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXd p = sub.inverse();
  return std::clamp(-p(0, 1) / std::sqrt(p(0, 0) * p(1, 1)), -1.0, 1.0);
}

InducedTauStructure induced_tau(const Eigen::MatrixXd& sigma, const DVine& vine) {
  if (sigma.rows() != vine.dim() || sigma.cols() != vine.dim())
    throw ArgumentError("induced_tau: covariance dimension does not match the vine");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sigma.cwiseAbs().maxCoeff())
    throw ParameterError("induced_tau: covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw ParameterError("induced_tau: covariance is not positive definite");
  InducedTauStructure out;
  for (const auto& e : vine.edges()) {
    out.labels.push_back(e.label());
    out.tau.push_back(2.0 * std::asin(partial_correlation(sigma, e.a, e.b, e.given)) / kPi);
  }
  return out;
}

std::vector<Eigen::VectorXd> probes_from_prior(const CopulaPrior& design, std::size_t count, Rng& rng) {
  const PointMatrix draws = design.sample(count, rng);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (Eigen::Index i = 0; i < draws.rows(); ++i) out.emplace_back(draws.row(i).transpose());
  return out;
}

std::vector<Eigen::VectorXd> probes_on_grid(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int per_axis) {
  if (lower.size() != upper.size() || lower.size() == 0) throw ArgumentError("probes_on_grid: bad bounds");
  if (per_axis < 1) throw ArgumentError("probes_on_grid: per_axis must be >= 1");
  const auto d = lower.size();
  std::size_t total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= static_cast<std::size_t>(per_axis);
  std::vector<Eigen::VectorXd> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Eigen::VectorXd p(d);
    std::size_t rest = flat;
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto k = static_cast<double>(rest % static_cast<std::size_t>(per_axis));
      rest /= static_cast<std::size_t>(per_axis);
      p[j] = per_axis == 1 ? 0.5 * (lower[j] + upper[j]) : lower[j] + (upper[j] - lower[j]) * k / (per_axis - 1);
    }
    out.push_back(std::move(p));
  }
  return out;
}

RejectionVerdict chronic_rejection_check(const DVine& prior_vine, const ModelSpec& model,
                                         const std::vector<Eigen::VectorXd>& probes, double tol, Execution exec) {
  if (probes.empty()) throw ArgumentError("chronic_rejection_check: probe set is empty");
  if (!(tol > 0.0)) throw ArgumentError("chronic_rejection_check: tolerance must be positive");
  if (prior_vine.dim() != model.dim()) throw ArgumentError("chronic_rejection_check: vine and model dimensions differ");
  for (const auto& p : probes)
    if (!model.in_interior({p.data(), static_cast<std::size_t>(p.size())}))
      throw DomainError("chronic_rejection_check: probe outside the parameter interior");

  std::vector<double> gaps(probes.size());
  std::vector<std::vector<double>> taus(probes.size());
  for_each_index(
      probes.size(),
      [&](std::size_t i) {
        const auto& p = probes[i];
        const Eigen::MatrixXd inv = inverse_fisher(model, {p.data(), static_cast<std::size_t>(p.size())});
        taus[i] = induced_tau(inv, prior_vine).tau;
        double gap = 0.0;
        for (std::size_t e = 0; e < taus[i].size(); ++e)
          gap = std::max(gap, std::abs(prior_vine.edges()[e].tau - taus[i][e]));
        gaps[i] = gap;
      },
      exec);

  // Ordered reduction: the first probe attaining the minimum wins.
  std::size_t best = 0;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i] < gaps[best]) best = i;
  RejectionVerdict v;
  v.worst_case_gap = gaps[best];
  v.nearest_theta = probes[best];
  v.nearest_tau = taus[best];
  v.probes = probes.size();
  v.tolerance = tol;
  v.chronically_rejected = v.worst_case_gap > tol;
  return v;
}

}  // namespace copula_lab
