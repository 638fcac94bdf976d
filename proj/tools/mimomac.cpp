// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run scenario files, property suites and figure reproductions.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "mimomac/errors.hpp"
#include "mimomac/experiments.hpp"

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kConfig = 2, kSolver = 3, kVerification = 4 };

int write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return std::cout ? kOk : kFailure;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return kFailure;
  }
  out << text;
  return out ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-allocation games on fast-fading two-user MIMO multiple access channels"};
  app.set_version_flag("--version", std::string(mimomac::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string suite;
  int figure = 0;
  std::size_t verify_trials = 10000;
  std::size_t mc_trials = 20000;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "Solve the game described by a scenario file and print a CSV table");
  run->add_option("config", config_path, "Scenario file")->required();
  run->add_option("--out", out_path, "Write the CSV here instead of the file's `output` key or stdout");

  auto* dump = app.add_subcommand("dump-config", "Print the effective configuration of a scenario file");
  dump->add_option("config", config_path, "Scenario file")->required();

  auto* verify = app.add_subcommand("verify", "Check the uniqueness-proof inequalities on random instances");
  verify->add_option("suite", suite, "all | dsc | lemmas | concavity")->required();
  verify->add_option("--trials", verify_trials, "Random instances per check")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "Master seed")->capture_default_str();
  verify->add_option("--out", out_path, "Write the report here instead of stdout");

  auto* reproduce = app.add_subcommand("reproduce", "Regenerate the curves of a figure as CSV");
  reproduce->add_option("figure", figure, "1 | 2 | 3 | 4")->required();
  reproduce->add_option("--trials", mc_trials, "Monte Carlo draws")->capture_default_str()->check(CLI::PositiveNumber);
  reproduce->add_option("--seed", seed, "Master seed")->capture_default_str();
  reproduce->add_option("--out", out_path, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      const auto cfg = mimomac::load_config(config_path);
      const auto table = mimomac::run_scenario(cfg);
      return write_text(table.to_csv(), out_path.empty() ? cfg.output : out_path);
    }
    if (*dump) {
      return write_text(mimomac::dump_config(mimomac::load_config(config_path)), "");
    }
    if (*verify) {
      const auto report = mimomac::run_verification(suite, verify_trials, seed);
      const int rc = write_text(report.to_text(), out_path);
      if (rc != kOk) return rc;
      return report.passed() ? kOk : kVerification;
    }
    if (*reproduce) {
      mimomac::McConfig mc{mc_trials, seed, 0};
      return write_text(mimomac::reproduce_figure(figure, mc).to_csv(), out_path);
    }
  } catch (const mimomac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const mimomac::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const mimomac::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const mimomac::ConstraintError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
