#pragma once

#include <span>

#include "copula_lab/copula.hpp"

namespace copula_lab {

/// Sample Kendall's tau-a: (concordant - discordant) / (n (n-1) / 2).
/// Tied pairs count as neither, which biases tied data slightly toward 0.
/// O(n log n) merge-count (Knight). Throws ArgumentError when n < 2.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Same statistic for the first two columns of a point matrix.
double kendall_tau(const PointMatrix& points);

/// O(n^2) pair enumeration; kept as a test oracle.
double kendall_tau_naive(std::span<const double> x, std::span<const double> y);

}  // namespace copula_lab
