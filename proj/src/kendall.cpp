#include "copula_lab/kendall.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "copula_lab/errors.hpp"

namespace copula_lab {

namespace {

// Sorts v in place and returns the number of inversions removed.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

// Sum of t(t-1)/2 over runs of equal values in a sorted sequence.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq equal) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal(i - 1, i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

void check_input(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("kendall_tau: x and y differ in length");
  if (x.size() < 2) throw ArgumentError("kendall_tau: need at least 2 points");
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_input(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  const std::int64_t n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[idx[a]] == x[idx[b]]; });
  const std::int64_t n3 = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return x[idx[a]] == x[idx[b]] && y[idx[a]] == y[idx[b]];
  });
  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  const std::int64_t swaps = merge_count(ys, buf, 0, n);
  const std::int64_t n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });
  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t net = n0 - n1 - n2 + n3 - 2 * swaps;
  return static_cast<double>(net) / static_cast<double>(n0);
}

double kendall_tau(const PointMatrix& points) {
  if (points.cols() < 2) throw ArgumentError("kendall_tau: need two columns");
  std::vector<double> x(static_cast<std::size_t>(points.rows())), y(x.size());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    x[static_cast<std::size_t>(i)] = points(i, 0);
    y[static_cast<std::size_t>(i)] = points(i, 1);
  }
  return kendall_tau(x, y);
}

double kendall_tau_naive(std::span<const double> x, std::span<const double> y) {
  check_input(x, y);
  const std::size_t n = x.size();
  std::int64_t net = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      net += (s > 0.0) - (s < 0.0);
    }
  }
  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  return static_cast<double>(net) / static_cast<double>(n0);
}

}  // namespace copula_lab
