#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "copula_lab/config.hpp"
#include "copula_lab/output.hpp"

using namespace copula_lab;
using nlohmann::json;

namespace {

RunConfig parse(Subcommand c, const std::string& text, ConfigOverrides o = {}) {
  return parse_config_json(c, json::parse(text), o);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("a seed-only tau retention config takes every default") {
  const RunConfig rc = parse(Subcommand::TauRetention, R"({"seed": 7})");
  CHECK(rc.seed == 7);
  CHECK(rc.study.seed == 7);
  CHECK(rc.study.repetitions == 1000);
  CHECK(rc.study.sample_sizes.size() == 5);
  CHECK(rc.study.sir.proposal_size == 50000);
  CHECK(rc.effective["repetitions"] == 1000);
  CHECK(rc.effective["study"] == "tau-retention");
}

TEST_CASE("out-of-range correlation names the field") {
  CHECK_THROWS_WITH_AS(parse(Subcommand::Coverage, R"({"rho_grid": [0.1, 1.2]})"), doctest::Contains("rho_grid[1]"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse(Subcommand::TauRetention, R"({"nature_rho": 1.2})"), doctest::Contains("nature_rho"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse(Subcommand::Diagnose, R"({"model": {"kind": "gamma"}, "prior_copula": {"family": "gaussian", "rho": 1.2}})"),
                       doctest::Contains("prior_copula.rho"), ConfigError);
}

TEST_CASE("command-line overrides win and reach the manifest echo") {
  ConfigOverrides o;
  o.repetitions = 50;
  o.seed = 99;
  o.output = "elsewhere";
  const RunConfig rc = parse(Subcommand::ModeConvergence, R"({"repetitions": 10, "seed": 1})", o);
  CHECK(rc.study.repetitions == 50);
  CHECK(rc.effective["repetitions"] == 50);
  CHECK(rc.effective["seed"] == 99);
  CHECK(rc.output_dir == "elsewhere");
}

TEST_CASE("unknown keys are errors in strict mode only") {
  CHECK_THROWS_WITH_AS(parse(Subcommand::TauRetention, R"({"repetitons": 10})"), doctest::Contains("repetitons"), ConfigError);
  CHECK_THROWS_WITH_AS(parse(Subcommand::Coverage, R"({"sir": {"size": 10}})"), doctest::Contains("sir.size"), ConfigError);
  ConfigOverrides lenient;
  lenient.strict = false;
  CHECK(parse(Subcommand::TauRetention, R"({"repetitons": 10})", lenient).study.repetitions == 1000);
}

TEST_CASE("type errors and malformed files") {
  CHECK_THROWS_WITH_AS(parse(Subcommand::TauRetention, R"({"repetitions": "many"})"), doctest::Contains("repetitions"),
                       ConfigError);
  const std::string path = "config_test_malformed.json";
  {
    std::ofstream f(path);
    f << "{\n  \"seed\": 3,\n  \"repetitions\": ,\n}\n";
  }
  CHECK_THROWS_WITH_AS(parse_config(Subcommand::TauRetention, path, {}), doctest::Contains("line 3"), ConfigError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(parse_config(Subcommand::TauRetention, std::string("does/not/exist.json"), {}), ConfigError);
}

TEST_CASE("diagnose configs") {
  SUBCASE("prior copula converted to a vine") {
    const RunConfig rc = parse(Subcommand::Diagnose,
                               R"({"model": {"kind": "multinomial", "categories": 3},
                                   "prior_copula": {"family": "gaussian", "rho": -0.9}})");
    CHECK(rc.diagnose.vine->edges()[0].tau == doctest::Approx(rho_to_tau(-0.9)).epsilon(1e-12));
    CHECK(rc.diagnose.probe == ProbeKind::Grid);
    CHECK(rc.diagnose.grid_lower.size() == 2);
  }
  SUBCASE("design prior probes") {
    const RunConfig rc = parse(Subcommand::Diagnose,
                               R"({"model": {"kind": "gamma"}, "vine_taus": [0.6],
                                   "probe": {"kind": "prior", "count": 64, "design_prior": {
                                     "marginals": [{"family": "gamma", "shape": 1000, "rate": 5000},
                                                   {"family": "gamma", "shape": 1000, "rate": 800}],
                                     "copula": {"family": "gaussian", "rho": 0.4}}}})");
    CHECK(rc.diagnose.probe_count == 64);
    CHECK(rc.diagnose.design_prior->marginals()[1].second() == 800.0);
    // Echo parses back to the same config.
    const RunConfig again = parse_config_json(Subcommand::Diagnose, rc.effective, {});
    CHECK(again.effective == rc.effective);
  }
  SUBCASE("explicit probes must match the model dimension") {
    CHECK_THROWS_AS(parse(Subcommand::Diagnose, R"({"model": {"kind": "normal"}, "vine_taus": [0.3],
                                                    "probe": {"kind": "explicit", "points": [[1, 2, 3]]}})"),
                    ConfigError);
  }
  CHECK_THROWS_AS(parse(Subcommand::Diagnose, R"({"model": {"kind": "normal"}})"), ConfigError);
  CHECK_THROWS_AS(parse(Subcommand::Diagnose, R"({"model": {"kind": "poisson"}, "vine_taus": [0.1]})"), ConfigError);
}

TEST_CASE("copula and marginal json round trips") {
  for (const std::string text : {R"({"family": "student_t", "rho": 0.3, "nu": 4})", R"({"family": "clayton", "theta": 2})",
                                 R"({"family": "frank", "theta": -3})", R"({"family": "independence", "dim": 3})"}) {
    const CopulaSpec c = copula_from_json(json::parse(text), "c", true);
    CHECK(copula_to_json(copula_from_json(copula_to_json(c), "c", true)) == copula_to_json(c));
  }
  const MarginalPrior m = marginal_from_json(json::parse(R"({"family": "normal", "mean": 1, "variance": 2})"), "m", true);
  CHECK(m.second() == 2.0);
  CHECK_THROWS_AS(marginal_from_json(json::parse(R"({"family": "beta", "a": -1, "b": 2})"), "m", true), ConfigError);
}

TEST_CASE("subcommand names") {
  for (auto s : {Subcommand::Diagnose, Subcommand::TauRetention, Subcommand::Coverage, Subcommand::GammaCoverage,
                 Subcommand::ModeConvergence, Subcommand::RegressionCoverage, Subcommand::CopulaInspect})
    CHECK(subcommand_from_string(to_string(s)) == s);
}

TEST_CASE("csv quoting and number formatting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(to_csv({"x", "y"}, {{"1", "a b"}}) == "x,y\n1,a b\n");
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

}  // TEST_SUITE
