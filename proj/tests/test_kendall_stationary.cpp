#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "copula_lab/copula.hpp"
#include "copula_lab/errors.hpp"
#include "copula_lab/kendall.hpp"
#include "copula_lab/stationary.hpp"

using namespace copula_lab;
using V = std::vector<double>;

TEST_SUITE("copula_core") {

TEST_CASE("kendall tau of monotone pairs") {
  V x{1, 2, 3, 4, 5, 6}, up{0.1, 0.4, 0.9, 1.2, 3.0, 7.0}, down(up.rbegin(), up.rend());
  CHECK(kendall_tau(x, up) == 1.0);
  CHECK(kendall_tau(x, down) == -1.0);
  CHECK(kendall_tau_naive(x, down) == -1.0);
  CHECK_THROWS_AS(kendall_tau(V{1.0}, V{2.0}), ArgumentError);
  CHECK_THROWS_AS(kendall_tau(V{1.0, 2.0}, V{2.0}), ArgumentError);
}

TEST_CASE("merge-count and pairwise kendall agree exactly") {
  Rng rng(3);
  for (int n : {2, 3, 17, 256, 1001}) {
    V x(static_cast<std::size_t>(n)), y(x.size());
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = standard_normal(rng);
      y[static_cast<std::size_t>(i)] = 0.3 * x[static_cast<std::size_t>(i)] + standard_normal(rng);
    }
    CHECK(kendall_tau(x, y) == kendall_tau_naive(x, y));
  }
  SUBCASE("ties count as neither concordant nor discordant") {
    V x{1, 1, 2, 3, 3, 4}, y{2, 1, 1, 5, 5, 0};
    CHECK(kendall_tau(x, y) == doctest::Approx(kendall_tau_naive(x, y)).epsilon(1e-15));
  }
}

TEST_CASE("gaussian sample tau near the closed form") {
  Rng rng(8);
  CHECK(std::abs(kendall_tau(CopulaSpec::gaussian(-0.9).sample(10000, rng)) + 0.713) < 0.02);
}

TEST_CASE("stationary points of the t copula against independence") {
  const auto ind = CopulaSpec::independence(2);
  const auto t4 = CopulaSpec::student_t(Eigen::MatrixXd::Identity(2, 2), 4.0);
  const auto a = classify_stationary_points(ind, t4);
  CHECK_FALSE(a.degenerate);
  CHECK(a.seeds == 101 * 101);
  auto find = [&](double u1, double u2, StationaryClass k) {
    return std::any_of(a.points.begin(), a.points.end(), [&](const StationaryPoint& p) {
      return p.kind == k && std::abs(p.u(0) - u1) < 1e-3 && std::abs(p.u(1) - u2) < 1e-3;
    });
  };
  CHECK(find(0.5, 0.5, StationaryClass::Max));
  CHECK(find(0.813, 0.813, StationaryClass::Saddle));
  CHECK(find(0.187, 0.813, StationaryClass::Saddle));

  SUBCASE("swapping the copulas exchanges maxima and minima") {
    const auto b = classify_stationary_points(t4, ind);
    REQUIRE(b.points.size() == a.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK((b.points[i].u - a.points[i].u).norm() < 1e-6);
      const auto expect = a.points[i].kind == StationaryClass::Max   ? StationaryClass::Min
                          : a.points[i].kind == StationaryClass::Min ? StationaryClass::Max
                                                                      : StationaryClass::Saddle;
      CHECK(b.points[i].kind == expect);
    }
  }
}

TEST_CASE("identical copulas are flagged as degenerate") {
  const auto g = CopulaSpec::gaussian(0.4);
  const auto a = classify_stationary_points(g, g, 21);
  CHECK(a.degenerate);
  CHECK(a.points.empty());
}

TEST_CASE("stationary analysis is two-dimensional only") {
  CHECK_THROWS_AS(classify_stationary_points(CopulaSpec::independence(3), CopulaSpec::independence(3)), ArgumentError);
}

}  // TEST_SUITE
