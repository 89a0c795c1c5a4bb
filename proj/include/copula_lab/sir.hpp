#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "copula_lab/kernels.hpp"
#include "copula_lab/proposals.hpp"

namespace copula_lab {

enum class Resampling { Multinomial, Systematic };

struct SirOptions {
  std::size_t proposal_size = 50000;  // N
  std::size_t resample_size = 5000;   // M
  Resampling resampling = Resampling::Multinomial;
  Execution execution = Execution::Parallel;
};

struct PosteriorSample {
  PointMatrix draws;                  // M x d
  std::uint64_t seed = 0;
  std::string proposal;
  std::size_t proposal_size = 0;
  std::size_t resample_size = 0;
  double ess = 0.0;                   // (sum w)^2 / sum w^2 over the N proposal draws
  bool low_ess = false;               // ess < 0.01 N
};

/// Log importance weight of one proposal draw (target minus proposal, up to a constant).
using LogWeightFn = std::function<double(std::span<const double> theta)>;

/// Sampling-importance-resampling. Draws N points from the proposal, weights them by
/// exp(log_weight - max), and resamples M of them with replacement.
/// Throws ConvergenceError when every weight is zero or non-finite.
PosteriorSample sir_posterior(const LogWeightFn& log_weight, const Proposal& proposal, const SirOptions& options,
                              Rng& rng, std::uint64_t seed = 0);

/// Convenience form with an explicit target: log_weight = target_log_pdf - proposal.log_pdf.
PosteriorSample sir_posterior_target(const LogWeightFn& target_log_pdf, const Proposal& proposal,
                                     const SirOptions& options, Rng& rng, std::uint64_t seed = 0);

/// Indices of M draws resampled from normalised weights w (sum 1).
std::vector<std::size_t> resample_indices(std::span<const double> w, std::size_t m, Resampling scheme, Rng& rng);

}  // namespace copula_lab
