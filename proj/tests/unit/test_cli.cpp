#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mimomac/config.hpp"
#include "mimomac/errors.hpp"
#include "mimomac/experiments.hpp"
#include "mimomac/table.hpp"

using namespace mimomac;

namespace {

const char* kSmall =
    "# small temporal scenario\n"
    "n_t = 2\n"
    "n_r = 2\n"
    "snr = 5 dB\n"
    "power_1 = 1\n"
    "power_2 = 10\n"
    "p_grid = [0.25, 0.75]\n"
    "game = tpa\n"
    "mc.trials = 200\n"
    "mc.seed = 3\n";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse_config(kSmall);
  CHECK(c.scenario.n_t == 2);
  CHECK(c.scenario.eta == doctest::Approx(std::pow(10.0, 0.5)));
  CHECK(c.scenario.power_2 == 10.0);
  CHECK(c.p_grid.size() == 2);
  CHECK(c.game == Game::tpa);
  CHECK(c.mc.trials == 200);
  CHECK(c.mc.master_seed == 3);

  const ScenarioConfig s = parse_config(
      "n_t = 2\nn_r = 2\nsnr = 2 lin\ntx_corr_1 = exp 0.4\ntx_corr_2 = [[1, [0.2, 0.1]], [[0.2, -0.1], 1]]\np = 0.3\n"
      "game = spa\n");
  CHECK(s.scenario.eta == 2.0);
  CHECK(s.scenario.tx_corr_1(0, 1).real() == doctest::Approx(0.4));
  CHECK(s.scenario.tx_corr_2(0, 1) == cplx(0.2, 0.1));
  CHECK(s.p_grid.size() == 1);
  CHECK(s.scenario.p == 0.3);
  CHECK(parse_config("n_t = 2\nn_r = 2\np_grid = 0:0.25:1\n").p_grid.size() == 5);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("n_t = 4\nbogus = 1\n") == 2);
  CHECK_THROWS_WITH_AS(parse_config("n_t = 4\nbogus = 1\n"), "line 2: unknown key 'bogus'", ConfigError);
  CHECK(error_line("n_t = 4\n\nn_t = 4\n") == 3);
  CHECK(error_line("snr = loud\n") == 1);
  CHECK(error_line("n_t = 4\nn_t_without_equals\n") == 2);
  CHECK(error_line("p = 0.5\np_grid = [0, 1]\n") == 2);
  CHECK(error_line("p = 1.5\n") == 1);
  CHECK(error_line("game = chess\n") == 1);
  CHECK(error_line("n_t = 2\nn_r = 2\ntx_corr_1 = [[2, 0], [0, 1]]\n") == 3);
  CHECK(error_line("n_t = 2\nn_r = 2\ntx_corr_1 = [[1, 0.2], [0.3, 1]]\n") == 3);
  CHECK(error_line("n_t = 4\nrx_corr = exp 1.2\n") == 2);
  CHECK(error_line("mc.trials = 0\n") == 1);
  CHECK(error_line("mc.trials = -3\n") == 1);
  CHECK_THROWS_AS(load_config("/nonexistent/config.conf"), ConfigError);
}

TEST_CASE("config round trip") {
  for (const char* text : {kSmall, "n_t = 4\nn_r = 4\nsnr = 3 dB\ntx_corr_1 = exp 0.4\ntx_corr_2 = [[1, 0.3, 0.09, 0.027], "
                                   "[0.3, 1, 0.3, 0.09], [0.09, 0.3, 1, 0.3], [0.027, 0.09, 0.3, 1]]\np = 0.2\ngame = spa\n"}) {
    const ScenarioConfig a = parse_config(text);
    const std::string dumped = dump_config(a);
    const ScenarioConfig b = parse_config(dumped);
    CHECK(dump_config(b) == dumped);
    CHECK(b.scenario.eta == a.scenario.eta);
    CHECK(b.scenario.tx_corr_2 == a.scenario.tx_corr_2);
    CHECK(b.p_grid == a.p_grid);
    CHECK(scenario_hash(a) == scenario_hash(b));
  }
}

TEST_CASE("scenario hash") {
  const ScenarioConfig a = parse_config(kSmall);
  ScenarioConfig b = a;
  b.mc.workers = 7;
  b.output = "elsewhere.csv";
  CHECK(scenario_hash(a) == scenario_hash(b));
  CHECK(scenario_hash(a).size() == 16);
  b.scenario.eta *= 2.0;
  CHECK(scenario_hash(a) != scenario_hash(b));
}

TEST_CASE("ranges") {
  const auto r = parse_range("0:0.05:1");
  REQUIRE(r.size() == 21);
  CHECK(r[1] == 0.05);
  CHECK(r[20] == 1.0);
  CHECK(r[7] == 0.35);
  CHECK_THROWS(parse_range("1:0.1:0"));
  CHECK_THROWS(parse_range("0:0:1"));
}

TEST_CASE("result tables") {
  ResultTable t({"x", "y"});
  t.add_meta("seed", "42");
  t.add_row(std::vector<double>{0.5, 2.0});
  t.add_row(std::vector<std::string>{"a", ""});
  CHECK_THROWS_AS(t.add_row(std::vector<double>{1.0}), DomainError);
  CHECK(t.to_csv() == "# seed: 42\nx,y\n0.5,2\na,\n");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("scenario runs are deterministic") {
  const ScenarioConfig c = parse_config(kSmall);
  const std::string a = run_scenario(c).to_csv();
  CHECK(a == run_scenario(c).to_csv());
  CHECK(a.find("# scenario_hash: " + scenario_hash(c)) != std::string::npos);
  CHECK(a.find("# seed: 3") != std::string::npos);
  CHECK(a.find("# version: " + std::string(kToolVersion)) != std::string::npos);
  ScenarioConfig w = c;
  w.mc.workers = 3;
  CHECK(run_scenario(w).to_csv() == a);
  ScenarioConfig d = c;
  d.mc.master_seed = 4;
  CHECK(run_scenario(d).to_csv() != a);

  ScenarioConfig spa = parse_config(std::string(kSmall) + "tx_corr_1 = exp 0.4\n");
  spa.game = Game::spa;
  const ResultTable t = run_scenario(spa);
  CHECK(t.columns().front() == "p");
  CHECK(t.rows().size() == 2);
}

TEST_CASE("verification reports") {
  const VerificationReport a = run_verification("lemmas", 50, 42);
  CHECK(a.passed());
  CHECK(a.checks.size() == 4);
  CHECK(a.to_text() == run_verification("lemmas", 50, 42).to_text());
  CHECK_THROWS_AS(run_verification("nonsense", 10, 1), DomainError);
  CHECK_THROWS_AS(run_verification("all", 0, 1), DomainError);

  VerificationReport bad{"custom", 1, 1, {CheckResult{"ok", true, 1, 0, 0.5, ""},
                                         CheckResult{"broken", false, 3, 1, -0.25, "trial 2"}}};
  CHECK_FALSE(bad.passed());
  const std::string text = bad.to_text();
  CHECK(text.find("FAIL broken instances=3 violations=1 worst_margin=-0.25\n  counterexample: trial 2") !=
        std::string::npos);
  CHECK(text.find("FAIL 1/2 checks passed") != std::string::npos);
}

TEST_CASE("figure scenarios") {
  CHECK_THROWS_AS(figure_config(7), DomainError);
  CHECK_THROWS_AS(reproduce_figure(0, {10, 1, 0}), DomainError);
  const ScenarioConfig f1 = figure_config(1);
  CHECK(f1.p_grid.size() == 21);
  CHECK(f1.scenario.power_2 == 10.0);
  const ScenarioConfig f3 = figure_config(3);
  CHECK(f3.game == Game::spa);
  CHECK(f3.scenario.tx_corr_2(0, 1).real() == doctest::Approx(0.3));
  CHECK(f3.scenario.eta == doctest::Approx(std::pow(10.0, 0.3)));
}
