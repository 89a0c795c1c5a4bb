#include <doctest.h>

#include <cmath>
#include <vector>

#include "copula_lab/diagnostics.hpp"
#include "copula_lab/errors.hpp"
#include "copula_lab/fisher.hpp"

using namespace copula_lab;
using V = std::vector<double>;

namespace {

double tau_of(double rho) { return 2.0 * std::asin(rho) / M_PI; }

Eigen::MatrixXd random_spd(int d, Rng& rng) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = standard_normal(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("partial correlation against the explicit three-variable formula") {
  Rng rng(51);
  for (int k = 0; k < 10; ++k) {
    const Eigen::MatrixXd s = random_spd(3, rng);
    const Eigen::MatrixXd r = covariance_to_correlation(s);
    const double ref = (r(0, 2) - r(0, 1) * r(1, 2)) / std::sqrt((1 - r(0, 1) * r(0, 1)) * (1 - r(1, 2) * r(1, 2)));
    CHECK(partial_correlation(s, 0, 2, {1}) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(partial_correlation(s, 0, 1, {}) == doctest::Approx(r(0, 1)).epsilon(1e-12));
  }
}

TEST_CASE("induced tau examples") {
  SUBCASE("diagonal covariance") {
    const auto t = induced_tau(Eigen::Vector4d(1, 2, 3, 4).asDiagonal().toDenseMatrix(), DVine(4));
    CHECK(t.tau.size() == 6);
    for (double x : t.tau) CHECK(x == 0.0);
  }
  SUBCASE("equicorrelated three variables") {
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(3, 3, 0.5);
    s.diagonal().setOnes();
    const auto t = induced_tau(s, DVine(3));
    CHECK(t.labels[2] == "1,3|2");
    CHECK(t.tau[0] == doctest::Approx(tau_of(0.5)));
    CHECK(t.tau[2] == doctest::Approx(tau_of(1.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("gamma model at alpha 2") {
    const auto t = induced_tau(inverse_fisher(ModelSpec::gamma_shape_rate(), V{2.0, 1.0}), DVine(2));
    CHECK(t.tau[0] == doctest::Approx(tau_of(1.0 / std::sqrt(2.0 * (M_PI * M_PI / 6.0 - 1.0)))).epsilon(1e-12));
    CHECK(t.tau[0] == doctest::Approx(tau_of(0.8805)).epsilon(1e-4));
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(induced_tau(bad, DVine(2)), ParameterError);
  CHECK_THROWS_AS(induced_tau(Eigen::MatrixXd::Identity(3, 3), DVine(2)), ArgumentError);
}

TEST_CASE("induced tau is invariant to scale and coordinate rescaling") {
  Rng rng(52);
  for (int k = 0; k < 10; ++k) {
    const Eigen::MatrixXd s = random_spd(4, rng);
    const auto base = induced_tau(s, DVine(4)).tau;
    const auto scaled = induced_tau(3.7 * s, DVine(4)).tau;
    Eigen::VectorXd dd(4);
    for (int i = 0; i < 4; ++i) dd[i] = 0.1 + 5.0 * uniform_open(rng);
    const auto rescaled = induced_tau(dd.asDiagonal() * s * dd.asDiagonal(), DVine(4)).tau;
    for (std::size_t e = 0; e < base.size(); ++e) {
      CHECK(scaled[e] == doctest::Approx(base[e]).epsilon(1e-12));
      CHECK(rescaled[e] == doctest::Approx(base[e]).epsilon(1e-12));
    }
  }
}

TEST_CASE("chronic rejection verdicts") {
  const auto grid3 = probes_on_grid(Eigen::Vector2d(0.05, 0.05), Eigen::Vector2d(0.95, 0.95), 10);
  SUBCASE("multinomial with a strongly dependent prior") {
    const auto v = chronic_rejection_check(DVine(2, V{rho_to_tau(-0.9)}), ModelSpec::multinomial(3), grid3, 0.01);
    CHECK(v.chronically_rejected);
    CHECK(v.worst_case_gap == doctest::Approx(0.7128674).epsilon(1e-6));
    CHECK(v.probes == 100);
  }
  SUBCASE("normal mean and variance") {
    const auto probes = probes_on_grid(Eigen::Vector2d(-5, 0.1), Eigen::Vector2d(5, 10), 7);
    CHECK(chronic_rejection_check(DVine(2, V{0.3}), ModelSpec::normal_mean_var(), probes, 0.01).chronically_rejected);
  }
  SUBCASE("gamma prior matching an attainable structure") {
    const double tau = induced_tau(inverse_fisher(ModelSpec::gamma_shape_rate(), V{2.0, 1.0}), DVine(2)).tau[0];
    const std::vector<Eigen::VectorXd> probes{Eigen::Vector2d(0.5, 1.0), Eigen::Vector2d(2.0, 1.0), Eigen::Vector2d(9.0, 3.0)};
    const auto v = chronic_rejection_check(DVine(2, V{tau}), ModelSpec::gamma_shape_rate(), probes, 0.01);
    CHECK_FALSE(v.chronically_rejected);
    CHECK(v.worst_case_gap < 1e-12);
    CHECK(v.nearest_theta[0] == 2.0);
  }
  SUBCASE("probes drawn from a design prior") {
    Rng rng(53);
    const CopulaPrior design({MarginalPrior::beta(20, 40), MarginalPrior::beta(30, 30)}, CopulaSpec::gaussian(-0.9));
    const auto probes = probes_from_prior(design, 512, rng);
    CHECK(probes.size() == 512);
    CHECK(chronic_rejection_check(DVine(2, V{-0.713}), ModelSpec::multinomial(3), probes, 0.01).chronically_rejected);
  }
  CHECK_THROWS_AS(chronic_rejection_check(DVine(2), ModelSpec::multinomial(3), {}, 0.01), ArgumentError);
  CHECK_THROWS_AS(chronic_rejection_check(DVine(2), ModelSpec::multinomial(3), {Eigen::Vector2d(1.2, 0.5)}, 0.01),
                  DomainError);
}

TEST_CASE("diagonal models reject exactly the dependent vines") {
  const auto probes = probes_on_grid(Eigen::VectorXd::Constant(3, 0.1), Eigen::VectorXd::Constant(3, 0.9), 4);
  const auto model = ModelSpec::multinomial(4);
  CHECK_FALSE(chronic_rejection_check(DVine(3), model, probes, 0.01).chronically_rejected);
  CHECK(chronic_rejection_check(DVine(3, V{0.0, 0.0, 0.05}), model, probes, 0.01).chronically_rejected);
  CHECK_FALSE(chronic_rejection_check(DVine(3, V{0.0, 0.0, 0.005}), model, probes, 0.01).chronically_rejected);
}

TEST_CASE("verdict is monotone in the tolerance") {
  const std::vector<Eigen::VectorXd> probes{Eigen::Vector2d(0.5, 1.0), Eigen::Vector2d(3.0, 2.0)};
  const DVine vine(2, V{0.5});
  bool rejected_before = true;
  for (double tol : {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.4}) {
    const auto v = chronic_rejection_check(vine, ModelSpec::gamma_shape_rate(), probes, tol);
    CHECK(v.chronically_rejected == (v.worst_case_gap > tol));
    if (!rejected_before) CHECK_FALSE(v.chronically_rejected);
    rejected_before = v.chronically_rejected;
  }
  CHECK_FALSE(rejected_before);
}

TEST_CASE("serial and parallel probe evaluation agree") {
  const auto probes = probes_on_grid(Eigen::Vector2d(0.2, 0.2), Eigen::Vector2d(20, 20), 15);
  const auto a = chronic_rejection_check(DVine(2, V{0.6}), ModelSpec::gamma_shape_rate(), probes, 0.01, Execution::Serial);
  const auto b = chronic_rejection_check(DVine(2, V{0.6}), ModelSpec::gamma_shape_rate(), probes, 0.01, Execution::Parallel);
  CHECK(a.worst_case_gap == b.worst_case_gap);
  CHECK(a.nearest_theta == b.nearest_theta);
}

}  // TEST_SUITE
