// Acceptance checks. Each criterion prints one PASS/FAIL line; the process exits non-zero if
// any line failed. Criterion numbers given as arguments restrict the run, e.g. `acceptance 6 7`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "copula_lab/copula.hpp"
#include "copula_lab/experiments.hpp"
#include "copula_lab/fisher.hpp"
#include "copula_lab/kendall.hpp"
#include "copula_lab/kernels.hpp"
#include "copula_lab/mode.hpp"
#include "copula_lab/output.hpp"
#include "copula_lab/proposals.hpp"
#include "copula_lab/sir.hpp"
#include "copula_lab/stationary.hpp"
#include "oracles.hpp"

using namespace copula_lab;
using V = std::vector<double>;

namespace {

struct Report {
  std::vector<std::string> lines;
  int failed = 0;

  void add(const std::string& id, bool pass, const std::string& detail) {
    std::string line = std::string(pass ? "PASS" : "FAIL") + "  " + id;
    line.resize(std::max<std::size_t>(line.size() + 2, 34), ' ');
    line += detail;
    std::cout << line << std::endl;
    lines.push_back(line);
    if (!pass) ++failed;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

const CellResult& cell(const StudyResult& r, std::int64_t n, std::function<bool(const CellResult&)> pick = {}) {
  for (const auto& c : r.cells)
    if (c.n == n && (!pick || pick(c))) return c;
  throw std::runtime_error("acceptance: missing study cell");
}

bool near_rho(const CellResult& c, double rho) { return std::abs(c.rho - rho) < 1e-12; }

StudyResult timed(const StudyConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  StudyResult r = run_study(cfg);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "  [" << to_string(cfg.study) << ": " << fmt("%.1f", s) << " s]" << std::endl;
  return r;
}

std::string failures_note(const CellResult& c) {
  return c.failures ? fmt(", %zu failed reps", c.failures) : std::string();
}

void tau_retention(Report& rep) {
  StudyConfig cfg = StudyConfig::defaults(StudyKind::TauRetention);
  cfg.repetitions = 1000;
  cfg.sample_sizes = {10, 1000, 100000};
  const StudyResult r = timed(cfg);
  const struct { std::int64_t n; double lo, hi; } want[] = {{10, -0.70, -0.66}, {1000, -0.19, -0.13}, {100000, -0.03, 0.03}};
  for (const auto& w : want) {
    const CellResult& c = cell(r, w.n);
    rep.add(fmt("1.tau n=%lld", static_cast<long long>(w.n)), c.estimate >= w.lo && c.estimate <= w.hi,
            fmt("median tau %.4f, want [%.2f, %.2f]", c.estimate, w.lo, w.hi) + failures_note(c));
  }
}

void multinomial_coverage(Report& rep) {
  StudyConfig a = StudyConfig::defaults(StudyKind::MultinomialCoverage);
  a.repetitions = 1000;
  a.sample_sizes = {10, 1000};
  a.rho_grid = {-0.9};
  const StudyResult ra = timed(a);
  for (std::int64_t n : {10, 1000}) {
    const CellResult& c = cell(ra, n, [](const CellResult& x) { return near_rho(x, -0.9); });
    rep.add(fmt("2.coverage rho=-0.9 n=%lld", static_cast<long long>(n)), std::abs(c.estimate - 0.95) <= 0.02,
            fmt("coverage %.3f (se %.3f), want 0.95 +- 0.02", c.estimate, c.se) + failures_note(c));
  }
  StudyConfig b = a;
  b.sample_sizes = {10};
  b.rho_grid = {0.9, -0.75};
  const StudyResult rb = timed(b);
  const CellResult& over = cell(rb, 10, [](const CellResult& x) { return near_rho(x, 0.9); });
  rep.add("2.coverage rho=+0.9 n=10", over.estimate < 0.90,
          fmt("coverage %.3f (se %.3f), want < 0.90", over.estimate, over.se) + failures_note(over));
  const CellResult& under = cell(rb, 10, [](const CellResult& x) { return near_rho(x, -0.75); });
  rep.add("2.coverage rho=-0.75 n=10", under.estimate > 0.95,
          fmt("coverage %.3f (se %.3f), want > 0.95", under.estimate, under.se) + failures_note(under));
}

void gamma_coverage(Report& rep) {
  StudyConfig cfg = StudyConfig::defaults(StudyKind::GammaCoverage);
  cfg.repetitions = 1000;
  cfg.sample_sizes = {10, 1000};
  cfg.rho_grid = {0.4};
  const StudyResult r = timed(cfg);
  for (std::int64_t n : {10, 1000}) {
    const CellResult& c = cell(r, n);
    rep.add(fmt("3.gamma rho=0.4 n=%lld", static_cast<long long>(n)), std::abs(c.estimate - 0.95) <= 0.02,
            fmt("coverage %.3f (se %.3f), want 0.95 +- 0.02", c.estimate, c.se) + failures_note(c));
  }
}

void mode_convergence(Report& rep) {
  StudyConfig cfg = StudyConfig::defaults(StudyKind::ModeConvergence);
  cfg.repetitions = 1000;
  cfg.sample_sizes = {10, 100, 1000, 10000, 100000};
  cfg.cases = {1, 2, 3, 4, 5, 6};
  const StudyResult r = timed(cfg);
  auto in_case = [](int id) { return [id](const CellResult& c) { return c.case_id == id; }; };

  const CellResult& c1 = cell(r, 10000, in_case(1));
  rep.add("4.mode case 1 n=1e4", c1.estimate >= 0.9,
          fmt("Pr(D2<=D1) %.3f (se %.3f), want >= 0.9", c1.estimate, c1.se) + failures_note(c1));

  StudyConfig big = cfg;
  big.repetitions = 2000;
  big.sample_sizes = {100000};
  big.cases = {3};
  const StudyResult r3 = timed(big);
  const CellResult& c3 = cell(r3, 100000, in_case(3));
  rep.add("4.mode case 3 n=1e5", std::abs(c3.estimate - 0.563) <= 0.04,
          fmt("Pr(D2<=D1) %.3f (se %.3f), want 0.563 +- 0.04", c3.estimate, c3.se) + failures_note(c3));

  const CellResult& c4 = cell(r, 10, in_case(4));
  rep.add("4.mode case 4 n=10", c4.estimate < 0.5,
          fmt("Pr(D2<=D1) %.3f (se %.3f), want < 0.5", c4.estimate, c4.se) + failures_note(c4));

  for (int id : cfg.cases) {
    std::ostringstream trail;
    bool decreasing = true;
    double prev = INFINITY;
    for (std::int64_t n : cfg.sample_sizes) {
      const double m = cell(r, n, in_case(id)).median_abs_diff;
      trail << (n == cfg.sample_sizes.front() ? "" : " > ") << fmt("%.3g", m);
      decreasing = decreasing && m < prev;
      prev = m;
    }
    rep.add(fmt("4.mode case %d |D2-D1|", id), decreasing, "median over reps: " + trail.str());
  }
}

void regression_coverage(Report& rep) {
  StudyConfig cfg = StudyConfig::defaults(StudyKind::RegressionCoverage);
  cfg.repetitions = 1000;
  cfg.sample_sizes = {10};
  cfg.cases = {6};
  const StudyResult r6 = timed(cfg);
  auto prior_is = [](RegressionPrior p) { return [p](const CellResult& c) { return c.prior == to_string(p); }; };

  const CellResult& i6 = cell(r6, 10, prior_is(RegressionPrior::Independence));
  const CellResult& t6 = cell(r6, 10, prior_is(RegressionPrior::StudentT));
  rep.add("5.regression case 6 cover", i6.estimate <= 0.01 && t6.estimate <= 0.01,
          fmt("coverage independence %.3f, t %.3f, want both <= 0.01", i6.estimate, t6.estimate) +
              failures_note(i6) + failures_note(t6));
  rep.add("5.regression case 6 area", t6.median_area <= 0.8 * i6.median_area,
          fmt("median area t %.4f vs independence %.4f (ratio %.3f), want ratio <= 0.80", t6.median_area,
              i6.median_area, t6.median_area / i6.median_area));

  cfg.sample_sizes = {100000};
  cfg.cases = {1};
  const StudyResult r1 = timed(cfg);
  const CellResult& i1 = cell(r1, 100000, prior_is(RegressionPrior::Independence));
  const CellResult& t1 = cell(r1, 100000, prior_is(RegressionPrior::StudentT));
  rep.add("5.regression case 1 cover",
          std::abs(i1.estimate - 0.95) <= 0.02 && std::abs(t1.estimate - 0.95) <= 0.02,
          fmt("coverage independence %.3f, t %.3f, want both 0.95 +- 0.02", i1.estimate, t1.estimate) +
              failures_note(i1) + failures_note(t1));
  const double gap = std::abs(t1.median_area - i1.median_area) / i1.median_area;
  rep.add("5.regression case 1 area", gap <= 0.02,
          fmt("median area t %.6f vs independence %.6f (gap %.2f%%), want <= 2%%", t1.median_area, i1.median_area,
              100 * gap));
}

LogTarget regression_posterior(const ModelSpec& model, const Dataset& data, const CopulaPrior& prior) {
  return [&model, &data, &prior](const Eigen::VectorXd& t, int order) {
    const std::span<const double> s(t.data(), static_cast<std::size_t>(t.size()));
    LogDensityDerivatives l = log_likelihood_derivatives(model, s, data, order);
    const LogDensityDerivatives p = prior.log_pdf_derivatives(s, order);
    l.value += p.value;
    if (order >= 1) l.gradient += p.gradient;
    if (order >= 2) l.hessian += p.hessian;
    return l;
  };
}

void properties(Report& rep) {
  // (a) multinomial inverse Fisher is diagonal in the conditional parameterisation.
  for (int w : {3, 4, 5}) {
    Rng rng(600 + static_cast<std::uint64_t>(w));
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    int total = 0, inside = 0;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      V theta(static_cast<std::size_t>(w - 1));
      for (double& z : theta) z = unif(rng);
      const auto nf = numeric_fisher_oracle(ModelSpec::multinomial(w), theta, FisherMethod::ScoreCovariance, 200000, rng);
      for (Eigen::Index i = 0; i < nf.inverse.rows(); ++i)
        for (Eigen::Index j = i + 1; j < nf.inverse.cols(); ++j) {
          const double ratio = std::abs(nf.inverse(i, j)) / nf.inverse_se(i, j);
          worst = std::max(worst, ratio);
          ++total;
          inside += ratio <= 3.0;
        }
    }
    rep.add(fmt("6a.fisher w=%d", w), inside == total,
            fmt("%d/%d off-diagonals within 3 SE of 0, largest %.2f SE", inside, total, worst));
  }

  // (b) gamma implied correlation against the numeric oracle.
  {
    bool ok = true;
    std::ostringstream os;
    Rng rng(610);
    for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
      const auto nf = numeric_fisher_oracle(ModelSpec::gamma_shape_rate(), V{alpha, 1.0},
                                            FisherMethod::HessianExpectation, 400000, rng);
      const double numeric = covariance_to_correlation(nf.inverse)(0, 1);
      const double closed = gamma_implied_correlation(alpha);
      const double rel = std::abs(numeric - closed) / closed;
      ok = ok && rel <= 0.02;
      os << fmt(" a=%g %.4f/%.4f", alpha, closed, numeric);
    }
    rep.add("6b.gamma correlation", ok, "closed/numeric:" + os.str() + ", want within 2%");
  }

  // (c) t copula point values.
  {
    const auto t4 = CopulaSpec::student_t(Eigen::MatrixXd::Identity(2, 2), 4.0);
    const double a = std::exp(t4.log_density(V{0.5, 0.99}));
    const double b = std::exp(t4.log_density(V{0.85, 0.9}));
    const double c = std::exp(t4.log_density(V{2.87e-7, 1.0}, V{1.0 - 2.87e-7, 6.22e-16}));
    const bool ok = std::abs(a / 0.533 - 1) <= 0.005 && std::abs(b / 1.047 - 1) <= 0.005 && std::abs(c / 5054.68 - 1) <= 0.01;
    rep.add("6c.t density values", ok, fmt("%.4f / %.4f / %.2f, want 0.533 / 1.047 / 5054.68", a, b, c));
  }

  // (d) rho <-> tau round trip.
  {
    double worst = 0.0;
    for (int i = -999; i <= 999; ++i) {
      const double x = i / 1000.0;
      worst = std::max(worst, std::abs(tau_to_rho(rho_to_tau(x)) - x));
      worst = std::max(worst, std::abs(rho_to_tau(tau_to_rho(x)) - x));
    }
    rep.add("6d.rho-tau round trip", worst < 1e-12, fmt("max error %.2e, want < 1e-12", worst));
  }

  // (e) SIR against the grid posterior of the three-category example.
  {
    const oracle::GridPosterior g = oracle::multinomial_grid_posterior();
    const CopulaPrior prior = multinomial_study_prior(-0.9);
    Dataset d;
    d.kind = ModelKind::MultinomialConditional;
    d.counts = {3, 4, 3};
    d.n = 10;
    const auto proposal = conjugate_proposal(ModelSpec::multinomial(3), prior.marginals(), d);
    Rng rng(620);
    const auto s = sir_posterior([&](std::span<const double> t) { return prior.log_copula_term(t); }, *proposal,
                                 SirOptions{}, rng, 620);
    const double mean = s.draws.col(0).mean();
    const double tau = kendall_tau(s.draws);
    rep.add("6e.sir vs grid", std::abs(mean - g.mean_z1) <= 0.01 && std::abs(tau - g.tau) <= 0.02,
            fmt("mean %.4f vs %.4f, tau %.4f vs %.4f, want within 0.01 / 0.02", mean, g.mean_z1, tau, g.tau));
  }

  // (f) stationary points of the t copula against independence.
  {
    const auto a = classify_stationary_points(CopulaSpec::independence(2),
                                              CopulaSpec::student_t(Eigen::MatrixXd::Identity(2, 2), 4.0));
    auto nearest = [&](double u1, double u2, StationaryClass k) {
      double best = INFINITY;
      for (const auto& p : a.points)
        if (p.kind == k) best = std::min(best, std::max(std::abs(p.u(0) - u1), std::abs(p.u(1) - u2)));
      return best;
    };
    const double dmax = nearest(0.5, 0.5, StationaryClass::Max);
    const double dsad = nearest(0.813, 0.813, StationaryClass::Saddle);
    rep.add("6f.stationary points", dmax <= 1e-3 && dsad <= 1e-3,
            fmt("max off by %.1e, saddle off by %.1e, want <= 1e-3", dmax, dsad));
  }

  // (g) one-step Newton approximation to the second posterior mode.
  {
    const auto model = ModelSpec::linreg_known_var(5.0, 2);
    const CopulaPrior p1 = regression_study_prior(RegressionPrior::Independence, 4.0);
    const CopulaPrior p2 = regression_study_prior(RegressionPrior::StudentT, 4.0);
    std::vector<double> med;
    for (std::int64_t n : {100, 1000, 10000}) {
      std::vector<double> rel;
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(630 + seed);
        const Dataset d = generate_data(model, V{0, 0}, n, rng);
        const auto m1 = posterior_mode(regression_posterior(model, d, p1), Eigen::Vector2d::Zero());
        const auto m2 = posterior_mode(regression_posterior(model, d, p2), m1.theta);
        const Eigen::VectorXd approx = one_step_newton_mode(m1.theta, -m1.hessian, p1.copula(), p2.copula(), p2.marginals());
        rel.push_back((approx - m2.theta).norm() / (m2.theta - m1.theta).norm());
      }
      med.push_back(median(rel));
    }
    const bool ok = med[2] < 0.10 && med[0] > med[1] && med[1] > med[2];
    rep.add("6g.one-step newton", ok,
            fmt("median relative error %.4f > %.4f > %.4f (n = 1e2, 1e3, 1e4), want decreasing and < 0.10", med[0],
                med[1], med[2]));
  }
}

void determinism(Report& rep) {
  for (StudyKind kind : {StudyKind::TauRetention, StudyKind::MultinomialCoverage, StudyKind::GammaCoverage,
                         StudyKind::ModeConvergence, StudyKind::RegressionCoverage}) {
    StudyConfig cfg = StudyConfig::defaults(kind);
    cfg.repetitions = 6;
    cfg.sample_sizes = {10, 1000};
    if (!cfg.rho_grid.empty()) cfg.rho_grid = {cfg.rho_grid.front(), cfg.nature_rho};
    cfg.cases = {1, 6};
    cfg.sir.proposal_size = 5000;
    cfg.sir.resample_size = 500;
    std::uint64_t hash[2];
    int threads[2] = {1, 8};
    for (int k = 0; k < 2; ++k) {
      set_thread_count(threads[k]);
      const StudyResult r = run_study(cfg);
      hash[k] = fnv1a(study_table_csv(r)) ^ (fnv1a(study_long_csv(r)) * 0x100000001b3ULL);
    }
    set_thread_count(0);
    rep.add("7.determinism " + to_string(kind), hash[0] == hash[1],
            fmt("csv hash %016llx at 1 thread, %016llx at 8", static_cast<unsigned long long>(hash[0]),
                static_cast<unsigned long long>(hash[1])));
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only(argv + 1, argv + argc);
  auto want = [&](const std::string& id) { return only.empty() || only.count(id) > 0; };
  const std::vector<std::pair<std::string, std::function<void(Report&)>>> criteria{
      {"1", tau_retention},     {"2", multinomial_coverage}, {"3", gamma_coverage}, {"4", mode_convergence},
      {"5", regression_coverage}, {"6", properties},         {"7", determinism}};

  Report rep;
  for (const auto& [id, run] : criteria) {
    if (!want(id)) continue;
    try {
      run(rep);
    } catch (const std::exception& e) {
      rep.add(id + ".error", false, e.what());
    }
  }

  std::ofstream out("acceptance_report.txt");
  for (const auto& l : rep.lines) out << l << "\n";
  std::cout << rep.lines.size() - static_cast<std::size_t>(rep.failed) << " passed, " << rep.failed << " failed"
            << std::endl;
  return rep.failed == 0 ? 0 : 1;
}
