#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "copula_lab/copula.hpp"

namespace copula_lab {

/// Serial kernels are the reference implementations; Parallel ones use OpenMP and
/// must produce bit-identical output for any thread count.
enum class Execution { Serial, Parallel };

/// Thread count used by Parallel kernels (defaults to the OpenMP runtime's choice).
void set_thread_count(int threads);
int thread_count();

/// out[i] = f(row i of points).
void map_rows(const PointMatrix& points, const std::function<double(std::span<const double>)>& f,
              std::span<double> out, Execution exec);

/// Calls f(i) for i in [0, n). Exceptions are collected and the one from the lowest
/// index is rethrown after all iterations finish.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& f, Execution exec);

/// Product-Gaussian kernel density on the grid gx x gy:
/// out(a, b) = (1 / M) sum_i phi((gx_a - x_i) / hx) phi((gy_b - y_i) / hy) / (hx hy).
/// The serial version sums point by point; the parallel one forms kernel matrices and
/// multiplies them over fixed blocks of grid rows.
Eigen::MatrixXd kde_grid_serial(const PointMatrix& points, const Eigen::VectorXd& gx,
                                const Eigen::VectorXd& gy, double hx, double hy);
Eigen::MatrixXd kde_grid_parallel(const PointMatrix& points, const Eigen::VectorXd& gx,
                                  const Eigen::VectorXd& gy, double hx, double hy);

}  // namespace copula_lab
