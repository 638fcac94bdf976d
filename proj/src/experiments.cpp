// SPDX-License-Identifier: Apache-2.0
#include "mimomac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mimomac/errors.hpp"

namespace mimomac {

namespace {

void common_meta(ResultTable& t, const ScenarioConfig& cfg, const std::string& what) {
  t.add_meta("tool", "mimomac");
  t.add_meta("version", std::string(kToolVersion));
  t.add_meta("experiment", what);
  t.add_meta("scenario_hash", scenario_hash(cfg));
  t.add_meta("seed", std::to_string(cfg.mc.master_seed));
  t.add_meta("trials", std::to_string(cfg.mc.trials));
}

ResultTable run_tpa(const ScenarioConfig& cfg) {
  const SweepResult sw = tpa_sumrate_sweep(cfg.scenario, cfg.p_grid, cfg.mc, cfg.solver);
  ResultTable t({"p", "alpha_1", "alpha_2", "sumrate_ne", "stderr", "rate_user1", "rate_user2", "sumrate_centralized",
                 "gap", "gap_stderr", "price_of_anarchy"});
  common_meta(t, cfg, "tpa");
  t.add_meta("relative_spread", format_number(sw.relative_spread()));
  for (std::size_t i = 0; i < sw.p.size(); ++i) {
    t.add_row({sw.p[i], sw.profiles[i].alpha_1(), sw.profiles[i].alpha_2(), sw.ne_sumrate[i].mean,
               sw.ne_sumrate[i].std_error, sw.user1[i].mean, sw.user2[i].mean, sw.centralized.mean, sw.gap[i].mean,
               sw.gap[i].std_error, sw.price_of_anarchy(i)});
  }
  return t;
}

ResultTable run_spa(const ScenarioConfig& cfg) {
  const SpaLineSweep ls = spa_line_sweep(cfg.scenario, cfg.p_grid, cfg.mc, cfg.solver);
  ResultTable t({"p", "sumrate_ne", "stderr", "sumrate_line", "residual", "residual_stderr", "sumrate_centralized"});
  common_meta(t, cfg, "spa");
  t.add_meta("a", format_number(ls.coeffs.a.mean));
  t.add_meta("a_stderr", format_number(ls.coeffs.a.std_error));
  t.add_meta("b", format_number(ls.coeffs.b.mean));
  t.add_meta("b_stderr", format_number(ls.coeffs.b.std_error));
  t.add_meta("stackelberg_p", format_number(stackelberg_p(ls.coeffs)));
  for (std::size_t i = 0; i < ls.p.size(); ++i) {
    const double line = ls.coeffs.a.mean * ls.p[i] + ls.coeffs.b.mean;
    t.add_row({ls.p[i], ls.sumrate[i].mean, ls.sumrate[i].std_error, line, ls.residual[i].mean,
               ls.residual[i].std_error, ls.centralized.mean});
  }
  return t;
}

ResultTable figure_1(const ScenarioConfig& cfg) {
  const SweepResult sw = tpa_sumrate_sweep(cfg.scenario, cfg.p_grid, cfg.mc, cfg.solver);
  ResultTable t({"p", "sumrate_ne", "sumrate_centralized", "stderr", "alpha_1", "alpha_2", "gap", "gap_stderr"});
  common_meta(t, cfg, "figure 1");
  t.add_meta("centralized_stderr", format_number(sw.centralized.std_error));
  t.add_meta("relative_spread", format_number(sw.relative_spread()));
  for (std::size_t i = 0; i < sw.p.size(); ++i) {
    t.add_row({sw.p[i], sw.ne_sumrate[i].mean, sw.centralized.mean, sw.ne_sumrate[i].std_error,
               sw.profiles[i].alpha_1(), sw.profiles[i].alpha_2(), sw.gap[i].mean, sw.gap[i].std_error});
  }
  return t;
}

ResultTable figure_2(const ScenarioConfig& cfg) {
  ResultTable t({"P", "sumrate_sic_fair", "sumrate_sic_unfair", "sumrate_sud", "stderr_fair", "stderr_unfair",
                 "stderr_sud", "fair_minus_sud", "fair_minus_sud_stderr"});
  common_meta(t, cfg, "figure 2");
  t.add_meta("power_grid", "P_1 = P, P_2 = 10 P, P = 0:1:20");
  for (int step = 0; step <= 20; ++step) {
    ChannelScenario sc = cfg.scenario;
    const double P = static_cast<double>(step);
    sc.power_1 = P;
    sc.power_2 = 10.0 * P;
    const DecoderComparison c = compare_decoders(sc, cfg.mc, cfg.solver);
    t.add_row({P, c.sic_fair.mean, c.sic_unfair.mean, c.sud.mean, c.sic_fair.std_error, c.sic_unfair.std_error,
               c.sud.std_error, c.fair_minus_sud.mean, c.fair_minus_sud.std_error});
  }
  return t;
}

ResultTable figure_3(const ScenarioConfig& cfg) {
  const SpaLineSweep ls = spa_line_sweep(cfg.scenario, cfg.p_grid, cfg.mc, cfg.solver);
  ResultTable t({"p", "sumrate_ne", "sumrate_centralized", "stderr", "sumrate_line", "residual", "residual_stderr"});
  common_meta(t, cfg, "figure 3");
  t.add_meta("a", format_number(ls.coeffs.a.mean));
  t.add_meta("a_stderr", format_number(ls.coeffs.a.std_error));
  t.add_meta("b", format_number(ls.coeffs.b.mean));
  t.add_meta("b_stderr", format_number(ls.coeffs.b.std_error));
  t.add_meta("stackelberg_p", format_number(stackelberg_p(ls.coeffs)));
  t.add_meta("centralized_stderr", format_number(ls.centralized.std_error));
  for (std::size_t i = 0; i < ls.p.size(); ++i) {
    t.add_row({ls.p[i], ls.sumrate[i].mean, ls.centralized.mean, ls.sumrate[i].std_error,
               ls.coeffs.a.mean * ls.p[i] + ls.coeffs.b.mean, ls.residual[i].mean, ls.residual[i].std_error});
  }
  return t;
}

ResultTable figure_4(const ScenarioConfig& cfg) {
  const RateRegion region = rate_region(cfg.scenario, cfg.p_grid, cfg.mc, cfg.solver);
  ResultTable t({"decoder", "p", "rate_user1", "rate_user2", "stderr_user1", "stderr_user2"});
  common_meta(t, cfg, "figure 4");
  t.add_meta("sumrate_centralized", format_number(region.centralized.mean));
  t.add_meta("chord_deviation", format_number(region.chord_deviation));
  for (const auto& pt : region.sic) {
    t.add_row({"sic", format_number(pt.p), format_number(pt.rate_1.mean), format_number(pt.rate_2.mean),
               format_number(pt.rate_1.std_error), format_number(pt.rate_2.std_error)});
  }
  const auto& s = region.sud;
  t.add_row({"sud", "", format_number(s.rate_1.mean), format_number(s.rate_2.mean), format_number(s.rate_1.std_error),
             format_number(s.rate_2.std_error)});
  return t;
}

const char* status(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

ResultTable run_scenario(const ScenarioConfig& config) {
  return config.game == Game::tpa ? run_tpa(config) : run_spa(config);
}

ScenarioConfig figure_config(int figure) {
  switch (figure) {
    case 1:
    case 2:
      return parse_config(
          "n_t = 4\nn_r = 4\nsnr = 5 dB\npower_1 = 1\npower_2 = 10\n"
          "p_grid = 0:0.05:1\ngame = tpa\n");
    case 3:
      return parse_config(
          "n_t = 4\nn_r = 4\nsnr = 3 dB\npower_1 = 5\npower_2 = 50\n"
          "tx_corr_1 = exp 0.4\ntx_corr_2 = exp 0.3\np_grid = 0:0.1:1\ngame = spa\n");
    case 4:
      return parse_config(
          "n_t = 4\nn_r = 4\nsnr = 3 dB\npower_1 = 5\npower_2 = 50\n"
          "tx_corr_1 = exp 0.4\ntx_corr_2 = exp 0.3\np_grid = 0:0.1:1\ngame = spa\n");
    default:
      throw DomainError("unknown figure " + std::to_string(figure) + "; expected 1, 2, 3 or 4");
  }
}

ResultTable reproduce_figure(int figure, const McConfig& mc) {
  ScenarioConfig cfg = figure_config(figure);
  mc.validate();
  cfg.mc = mc;
  switch (figure) {
    case 1:
      return figure_1(cfg);
    case 2:
      return figure_2(cfg);
    case 3:
      return figure_3(cfg);
    default:
      return figure_4(cfg);
  }
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << "# suite: " << suite << ", trials: " << trials << ", seed: " << seed << "\n";
  std::size_t failed = 0;
  for (const auto& c : checks) {
    os << status(c.passed) << " " << c.name << " instances=" << c.instances << " violations=" << c.violations
       << " worst_margin=" << format_number(c.worst_margin) << "\n";
    if (!c.passed) {
      ++failed;
      os << "  counterexample: " << c.counterexample << "\n";
    }
  }
  os << status(failed == 0) << " " << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return os.str();
}

VerificationReport run_verification(std::string_view suite, std::size_t trials, std::uint64_t seed) {
  const bool all = suite == "all";
  if (!all && suite != "dsc" && suite != "lemmas" && suite != "concavity") {
    throw DomainError("unknown verification suite '" + std::string(suite) + "'; expected all, dsc, lemmas or concavity");
  }
  if (trials == 0) throw DomainError("trials must be >= 1");
  VerificationReport report{std::string(suite), seed, trials, {}};
  ChannelScenario fig1 = figure_config(1).scenario;
  fig1.p = 0.5;

  if (all || suite == "lemmas") {
    for (auto& c : verify_trace_lemmas(trials, 4, seed)) report.checks.push_back(std::move(c));
  }
  if (all || suite == "dsc") report.checks.push_back(verify_dsc(fig1, trials, seed));
  if (all || suite == "concavity") {
    const McConfig mc{std::min<std::size_t>(trials, 2000), seed, 0};
    for (double p : {0.25, 0.5, 0.75}) {
      ChannelScenario sc = fig1;
      sc.p = p;
      for (auto& c : verify_concavity(sc, 0.01, mc)) {
        c.name += "-p" + format_number(p);
        report.checks.push_back(std::move(c));
      }
    }
  }
  return report;
}

}  // namespace mimomac
