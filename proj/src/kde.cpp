#include "copula_lab/kde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "copula_lab/errors.hpp"

namespace copula_lab {

namespace {

// Type-7 sample quantile of sorted data.
double sorted_quantile(const std::vector<double>& s, double p) {
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

double reference_bandwidth(std::span<const double> x) {
  if (x.size() < 2) throw ArgumentError("reference_bandwidth: need at least 2 values");
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw ArgumentError("kde2d: an axis has zero variance");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double iqr = sorted_quantile(s, 0.75) - sorted_quantile(s, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 1.06 * spread * std::pow(n, -0.2);
}

bool KdeSurface::contains(double x, double y) const {
  return x >= gx[0] && x <= gx[gx.size() - 1] && y >= gy[0] && y <= gy[gy.size() - 1];
}

double KdeSurface::interpolate(double x, double y) const {
  if (!contains(x, y)) return 0.0;
  const double fx = (x - gx[0]) / dx(), fy = (y - gy[0]) / dy();
  const auto a = std::min(static_cast<Eigen::Index>(fx), gx.size() - 2);
  const auto b = std::min(static_cast<Eigen::Index>(fy), gy.size() - 2);
  const double tx = fx - static_cast<double>(a), ty = fy - static_cast<double>(b);
  return (1.0 - tx) * (1.0 - ty) * density(a, b) + tx * (1.0 - ty) * density(a + 1, b) +
         (1.0 - tx) * ty * density(a, b + 1) + tx * ty * density(a + 1, b + 1);
}

KdeSurface kde2d(const PointMatrix& points, const KdeOptions& options) {
  if (points.cols() != 2) throw ArgumentError("kde2d: points must be 2-D");
  if (points.rows() < 20) throw ArgumentError("kde2d: need at least 20 points");
  if (options.nx < 2 || options.ny < 2) throw ArgumentError("kde2d: grid needs at least 2 nodes per axis");
  const std::vector<double> xs(points.col(0).begin(), points.col(0).end());
  const std::vector<double> ys(points.col(1).begin(), points.col(1).end());

  KdeSurface s;
  if (options.bandwidth) {
    s.hx = (*options.bandwidth)[0];
    s.hy = (*options.bandwidth)[1];
    if (!(s.hx > 0.0 && s.hy > 0.0)) throw ArgumentError("kde2d: bandwidths must be positive");
  } else {
    s.hx = reference_bandwidth(xs);
    s.hy = reference_bandwidth(ys);
  }
  Eigen::Vector4d box;
  if (options.bounds) {
    box = *options.bounds;
  } else {
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    box << *xmin - 3.0 * s.hx, *xmax + 3.0 * s.hx, *ymin - 3.0 * s.hy, *ymax + 3.0 * s.hy;
  }
  if (!(box[1] > box[0] && box[3] > box[2])) throw ArgumentError("kde2d: empty grid bounds");
  s.gx = Eigen::VectorXd::LinSpaced(options.nx, box[0], box[1]);
  s.gy = Eigen::VectorXd::LinSpaced(options.ny, box[2], box[3]);
  s.density = options.execution == Execution::Serial ? kde_grid_serial(points, s.gx, s.gy, s.hx, s.hy)
                                                     : kde_grid_parallel(points, s.gx, s.gy, s.hx, s.hy);
  return s;
}

}  // namespace copula_lab
