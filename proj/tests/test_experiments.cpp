#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "copula_lab/errors.hpp"
#include "copula_lab/experiments.hpp"
#include "copula_lab/kernels.hpp"
#include "copula_lab/output.hpp"

using namespace copula_lab;

namespace {

StudyConfig small(StudyKind kind) {
  StudyConfig c = StudyConfig::defaults(kind);
  c.repetitions = 6;
  c.sir.proposal_size = 4000;
  c.sir.resample_size = 400;
  c.kde_grid = 40;
  c.qmc_points = 256;
  c.qmc_replicates = 4;
  return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("documented defaults") {
  const auto t = StudyConfig::defaults(StudyKind::TauRetention);
  CHECK(t.repetitions == 1000);
  CHECK(t.sample_sizes == std::vector<std::int64_t>{10, 100, 1000, 10000, 100000});
  CHECK(t.nature_rho == -0.9);
  const auto m = StudyConfig::defaults(StudyKind::MultinomialCoverage);
  CHECK(m.rho_grid.size() == 39);
  CHECK(m.rho_grid.front() == doctest::Approx(-0.95));
  const auto g = StudyConfig::defaults(StudyKind::GammaCoverage);
  CHECK(g.nature_rho == 0.4);
  CHECK(g.rho_grid.front() == 0.0);
  CHECK(t.sir.proposal_size == 10 * t.sir.resample_size);
}

TEST_CASE("validation names the offending field") {
  auto c = StudyConfig::defaults(StudyKind::MultinomialCoverage);
  c.rho_grid = {0.2, 1.2};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("rho_grid"), ArgumentError);
  c = StudyConfig::defaults(StudyKind::TauRetention);
  c.repetitions = 0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("repetitions"), ArgumentError);
  c = StudyConfig::defaults(StudyKind::TauRetention);
  c.sample_sizes = {10, -3};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("sample_sizes"), ArgumentError);
  c = StudyConfig::defaults(StudyKind::ModeConvergence);
  c.cases = {7};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("cases"), ArgumentError);
}

TEST_CASE("regression cases") {
  CHECK(regression_case(1).theta0.norm() == 0.0);
  CHECK(regression_case(2).theta0[0] == doctest::Approx(-0.012533469508069276).epsilon(1e-12));
  CHECK(regression_case(3).theta0[0] == doctest::Approx(0.8891900184743315).epsilon(1e-12));
  CHECK(regression_case(6).theta0 == Eigen::Vector2d(-5, 8));
  CHECK_THROWS_AS(regression_case(0), ArgumentError);
}

TEST_CASE("tau retention cell structure") {
  auto c = small(StudyKind::TauRetention);
  c.sample_sizes = {10};
  auto r = run_study(c);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].repetitions + r.cells[0].failures == 6);
  CHECK(r.cells[0].min <= r.cells[0].estimate);
  CHECK(r.cells[0].estimate <= r.cells[0].max);
  c.sample_sizes = StudyConfig::defaults(StudyKind::TauRetention).sample_sizes;
  r = run_study(c);
  CHECK(r.cells.size() == 5);
  const std::string table = study_table_csv(r);
  CHECK(std::count(table.begin(), table.end(), '\n') == 6);
  CHECK(table.rfind("n,min,median,max\n", 0) == 0);
}

TEST_CASE("coverage cells report proportions with binomial errors") {
  auto c = small(StudyKind::MultinomialCoverage);
  c.rho_grid = {-0.9, 0.5};
  c.sample_sizes = {10};
  const auto r = run_study(c);
  REQUIRE(r.cells.size() == 2);
  for (const auto& cell : r.cells) {
    CHECK(cell.repetitions + cell.failures == c.repetitions);
    CHECK(cell.estimate >= 0.0);
    CHECK(cell.estimate <= 1.0);
    const double p = cell.estimate, n = static_cast<double>(cell.repetitions);
    CHECK(cell.se == doctest::Approx(std::sqrt(p * (1 - p) / n)));
    CHECK(cell.median_area > 0.0);
  }
}

TEST_CASE("gamma coverage, mode and regression studies run end to end") {
  auto g = small(StudyKind::GammaCoverage);
  g.rho_grid = {0.4};
  g.sample_sizes = {10};
  CHECK(run_study(g).cells.size() == 1);
  auto m = small(StudyKind::ModeConvergence);
  m.sample_sizes = {10, 1000};
  const auto mr = run_study(m);
  CHECK(mr.cells.size() == 12);
  CHECK(mr.failure_log.empty());
  auto rc = small(StudyKind::RegressionCoverage);
  rc.cases = {1, 6};
  rc.sample_sizes = {10};
  const auto rr = run_study(rc);
  CHECK(rr.cells.size() == 4);
  CHECK(rr.cells[1].prior == "t");
}

TEST_CASE("results do not depend on the thread count") {
  auto c = small(StudyKind::MultinomialCoverage);
  c.rho_grid = {-0.9};
  c.sample_sizes = {10, 1000};
  const int saved = thread_count();
  set_thread_count(1);
  const auto a = run_study(c);
  set_thread_count(8);
  const auto b = run_study(c);
  set_thread_count(saved);
  CHECK(study_table_csv(a) == study_table_csv(b));
  CHECK(study_long_csv(a) == study_long_csv(b));
}

TEST_CASE("analysis priors share data within a repetition") {
  // With identical analysis priors the per-repetition outcomes coincide cell for cell.
  auto c = small(StudyKind::MultinomialCoverage);
  c.rho_grid = {-0.5, -0.5};
  c.sample_sizes = {10};
  const auto r = run_study(c);
  CHECK(r.cells[0].values == r.cells[1].values);
}

}  // TEST_SUITE
