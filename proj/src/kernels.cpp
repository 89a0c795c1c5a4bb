#include "copula_lab/kernels.hpp"

#include <cmath>
#include <exception>
#include <vector>

#include <omp.h>

#include "copula_lab/errors.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

namespace {

int g_threads = 0;

constexpr Eigen::Index kKdeBlock = 16;

}  // namespace

void set_thread_count(int threads) {
  if (threads < 0) throw ArgumentError("thread count must be >= 0");
  g_threads = threads;
}

int thread_count() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

void map_rows(const PointMatrix& points, const std::function<double(std::span<const double>)>& f,
              std::span<double> out, Execution exec) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (out.size() != n) throw ArgumentError("map_rows: output size mismatch");
  const auto cols = static_cast<std::size_t>(points.cols());
  for_each_index(
      n, [&](std::size_t i) { out[i] = f({points.data() + i * cols, cols}); }, exec);
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& f, Execution exec) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        f(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        f(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Eigen::MatrixXd kde_grid_serial(const PointMatrix& points, const Eigen::VectorXd& gx,
                                const Eigen::VectorXd& gy, double hx, double hy) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(gx.size(), gy.size());
  const double norm = 1.0 / (static_cast<double>(points.rows()) * hx * hy);
  std::vector<double> ky(static_cast<std::size_t>(gy.size()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index b = 0; b < gy.size(); ++b)
      ky[static_cast<std::size_t>(b)] = normal_pdf((gy[b] - points(i, 1)) / hy);
    for (Eigen::Index a = 0; a < gx.size(); ++a) {
      const double kx = normal_pdf((gx[a] - points(i, 0)) / hx);
      for (Eigen::Index b = 0; b < gy.size(); ++b) out(a, b) += kx * ky[static_cast<std::size_t>(b)];
    }
  }
  return out * norm;
}

Eigen::MatrixXd kde_grid_parallel(const PointMatrix& points, const Eigen::VectorXd& gx,
                                  const Eigen::VectorXd& gy, double hx, double hy) {
  const Eigen::Index m = points.rows();
  const Eigen::Index nx = gx.size(), ny = gy.size();
  Eigen::MatrixXd kx(nx, m), ky(ny, m);
  const double norm = 1.0 / (static_cast<double>(m) * hx * hy);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index a = 0; a < nx; ++a) kx(a, i) = normal_pdf((gx[a] - points(i, 0)) / hx);
    for (Eigen::Index b = 0; b < ny; ++b) ky(b, i) = normal_pdf((gy[b] - points(i, 1)) / hy);
  }
  Eigen::MatrixXd out(nx, ny);
  const Eigen::Index blocks = (nx + kKdeBlock - 1) / kKdeBlock;
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index start = blk * kKdeBlock;
    const Eigen::Index rows = std::min(kKdeBlock, nx - start);
    out.middleRows(start, rows).noalias() = kx.middleRows(start, rows) * ky.transpose();
  }
  return out * norm;
}

}  // namespace copula_lab
