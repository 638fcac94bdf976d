// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mimomac/analysis.hpp"
#include "mimomac/config.hpp"
#include "mimomac/table.hpp"

namespace mimomac {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Runs the game named in the config over its p grid and tabulates the equilibrium.
/// TPA: NE fractions, MC sum-rate and utilities, centralized rate and price of anarchy.
/// SPA: MC sum-rate against the fitted line a p + b and the centralized optimum.
ResultTable run_scenario(const ScenarioConfig& config);

/// Built-in scenario of figure 1..4; throws DomainError for other ids.
ScenarioConfig figure_config(int figure);

/// Regenerates the curves of a figure with the given Monte Carlo settings.
ResultTable reproduce_figure(int figure, const McConfig& mc);

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// One line per check plus a summary; deterministic for fixed (suite, trials, seed).
  std::string to_text() const;
};

/// Suites: all, dsc, lemmas, concavity. `trials` random instances per property check; the
/// Monte Carlo concavity check uses min(trials, 2000) draws. Throws DomainError for unknown suites.
VerificationReport run_verification(std::string_view suite, std::size_t trials, std::uint64_t seed);

}  // namespace mimomac
