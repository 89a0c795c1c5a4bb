#include "copula_lab/sir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "copula_lab/errors.hpp"

namespace copula_lab {

std::vector<std::size_t> resample_indices(std::span<const double> w, std::size_t m, Resampling scheme, Rng& rng) {
  std::vector<double> cdf(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    cdf[i] = acc;
  }
  std::vector<std::size_t> out(m);
  auto locate = [&](double t) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), t * acc);
    return std::min(static_cast<std::size_t>(it - cdf.begin()), w.size() - 1);
  };
  if (scheme == Resampling::Systematic) {
    const double offset = uniform_open(rng);
    for (std::size_t k = 0; k < m; ++k) out[k] = locate((static_cast<double>(k) + offset) / static_cast<double>(m));
  } else {
    for (std::size_t k = 0; k < m; ++k) out[k] = locate(uniform_open(rng));
  }
  return out;
}

PosteriorSample sir_posterior(const LogWeightFn& log_weight, const Proposal& proposal, const SirOptions& options,
                              Rng& rng, std::uint64_t seed) {
  const std::size_t n = options.proposal_size, m = options.resample_size;
  if (m < 1 || n < m) throw ArgumentError("sir_posterior: need N >= M >= 1");
  const PointMatrix draws = proposal.sample(n, rng);
  std::vector<double> lw(n);
  map_rows(draws, log_weight, lw, options.execution);

  double top = -std::numeric_limits<double>::infinity();
  for (double v : lw)
    if (std::isfinite(v)) top = std::max(top, v);
  if (!std::isfinite(top)) throw ConvergenceError("sir_posterior: all importance weights are zero or non-finite");
  std::vector<double> w(n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::isfinite(lw[i]) ? std::exp(lw[i] - top) : 0.0;
    sum += w[i];
    sum_sq += w[i] * w[i];
  }

  PosteriorSample out;
  out.seed = seed;
  out.proposal = proposal.describe();
  out.proposal_size = n;
  out.resample_size = m;
  out.ess = sum * sum / sum_sq;
  out.low_ess = out.ess < 0.01 * static_cast<double>(n);
  const auto idx = resample_indices(w, m, options.resampling, rng);
  out.draws.resize(static_cast<Eigen::Index>(m), draws.cols());
  for (std::size_t k = 0; k < m; ++k) out.draws.row(static_cast<Eigen::Index>(k)) = draws.row(static_cast<Eigen::Index>(idx[k]));
  return out;
}

PosteriorSample sir_posterior_target(const LogWeightFn& target_log_pdf, const Proposal& proposal,
                                     const SirOptions& options, Rng& rng, std::uint64_t seed) {
  return sir_posterior(
      [&](std::span<const double> t) { return target_log_pdf(t) - proposal.log_pdf(t); }, proposal, options, rng, seed);
}

}  // namespace copula_lab
