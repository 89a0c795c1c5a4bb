// Serial reference kernels against their OpenMP counterparts.

#include <span>
#include <vector>

#include <benchmark/benchmark.h>

#include "copula_lab/copula.hpp"
#include "copula_lab/kernels.hpp"
#include "copula_lab/rng.hpp"

using namespace copula_lab;

namespace {

PointMatrix sample_points(std::size_t n) {
  Rng rng(7);
  return CopulaSpec::gaussian(-0.5).sample(n, rng);
}

Eigen::VectorXd grid(double lo, double hi, int k) { return Eigen::VectorXd::LinSpaced(k, lo, hi); }

void copula_weights(benchmark::State& state, Execution exec) {
  const PointMatrix u = sample_points(static_cast<std::size_t>(state.range(0)));
  const auto t4 = CopulaSpec::student_t(Eigen::MatrixXd::Identity(2, 2), 4.0);
  std::vector<double> out(static_cast<std::size_t>(u.rows()));
  for (auto _ : state) {
    map_rows(u, [&](std::span<const double> x) { return t4.log_density(x); }, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * u.rows());
}

void kde(benchmark::State& state, bool parallel) {
  const PointMatrix u = sample_points(static_cast<std::size_t>(state.range(0)));
  const Eigen::VectorXd g = grid(0.0, 1.0, 150);
  for (auto _ : state) {
    Eigen::MatrixXd d = parallel ? kde_grid_parallel(u, g, g, 0.05, 0.05) : kde_grid_serial(u, g, g, 0.05, 0.05);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * u.rows());
}

}  // namespace

BENCHMARK_CAPTURE(copula_weights, serial, Execution::Serial)->Arg(50000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(copula_weights, parallel, Execution::Parallel)->Arg(50000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(kde, serial, false)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(kde, parallel, true)->Arg(5000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
