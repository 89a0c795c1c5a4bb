#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "copula_lab/copula.hpp"
#include "copula_lab/kernels.hpp"

namespace copula_lab {

/// Normal reference bandwidth 1.06 min(sd, IQR / 1.34) n^(-1/5).
/// Throws ArgumentError for a zero-variance sample.
double reference_bandwidth(std::span<const double> x);

struct KdeOptions {
  int nx = 150;
  int ny = 150;
  /// Grid bounds; by default the data range padded by 3 bandwidths on each side.
  std::optional<Eigen::Vector4d> bounds;  // (x0, x1, y0, y1)
  std::optional<Eigen::Vector2d> bandwidth;
  Execution execution = Execution::Parallel;
};

/// Density values on the nodes of a regular grid.
struct KdeSurface {
  Eigen::VectorXd gx;
  Eigen::VectorXd gy;
  Eigen::MatrixXd density;  // density(a, b) at (gx[a], gy[b])
  double hx = 0.0;
  double hy = 0.0;

  double dx() const { return gx[1] - gx[0]; }
  double dy() const { return gy[1] - gy[0]; }
  bool contains(double x, double y) const;
  /// Bilinear interpolation; 0 outside the grid.
  double interpolate(double x, double y) const;
};

/// Product-Gaussian kernel density estimate of 2-D points (at least 20).
KdeSurface kde2d(const PointMatrix& points, const KdeOptions& options = {});

}  // namespace copula_lab
