#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "copula_lab/copula.hpp"
#include "copula_lab/kernels.hpp"

using namespace copula_lab;

namespace {

PointMatrix uniform_points(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PointMatrix p(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, 0) = uniform_open(rng), p(i, 1) = uniform_open(rng);
  return p;
}

struct ThreadGuard {
  int saved = thread_count();
  ~ThreadGuard() { set_thread_count(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("map_rows gives the same values serially and in parallel") {
  const PointMatrix p = uniform_points(5000, 81);
  const auto t = CopulaSpec::student_t(0.4, 4.0);
  auto f = [&](std::span<const double> u) { return t.log_density(u); };
  std::vector<double> a(5000), b(5000);
  map_rows(p, f, a, Execution::Serial);
  ThreadGuard g;
  for (int threads : {1, 3, 8}) {
    set_thread_count(threads);
    map_rows(p, f, b, Execution::Parallel);
    CHECK(a == b);
  }
}

TEST_CASE("for_each_index visits every index once and rethrows the lowest failure") {
  std::vector<std::atomic<int>> hits(1000);
  for_each_index(1000, [&](std::size_t i) { hits[i]++; }, Execution::Parallel);
  for (const auto& h : hits) CHECK(h.load() == 1);
  try {
    for_each_index(
        100, [](std::size_t i) { if (i % 7 == 3) throw std::runtime_error(std::to_string(i)); }, Execution::Parallel);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "3");
  }
}

TEST_CASE("kde grid kernels agree") {
  const PointMatrix p = uniform_points(777, 82);
  const Eigen::VectorXd gx = Eigen::VectorXd::LinSpaced(37, -0.2, 1.2), gy = Eigen::VectorXd::LinSpaced(29, -0.1, 1.1);
  const Eigen::MatrixXd s = kde_grid_serial(p, gx, gy, 0.07, 0.05);
  ThreadGuard g;
  set_thread_count(1);
  const Eigen::MatrixXd p1 = kde_grid_parallel(p, gx, gy, 0.07, 0.05);
  set_thread_count(8);
  const Eigen::MatrixXd p8 = kde_grid_parallel(p, gx, gy, 0.07, 0.05);
  CHECK(p1 == p8);
  CHECK((s - p1).cwiseAbs().maxCoeff() <= 1e-12 * s.maxCoeff());
  // Spot check one node by direct summation.
  double ref = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double a = (gx[5] - p(i, 0)) / 0.07, b = (gy[11] - p(i, 1)) / 0.05;
    ref += std::exp(-0.5 * (a * a + b * b)) / (2 * M_PI * 0.07 * 0.05);
  }
  CHECK(s(5, 11) == doctest::Approx(ref / 777.0).epsilon(1e-12));
}

}  // TEST_SUITE
