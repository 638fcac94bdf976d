// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mimomac/channel.hpp"
#include "mimomac/games.hpp"
#include "mimomac/montecarlo.hpp"

namespace mimomac {

enum class Game { tpa, spa };

/// How a correlation matrix was written in the file; kept so the effective config can be dumped.
struct CorrelationSpec {
  enum class Kind { identity, exponential, explicit_matrix };
  Kind kind = Kind::identity;
  double t = 0.0;
  std::string matrix_text;  ///< canonical JSON array for explicit matrices

  HermitianMatrix build(std::size_t n) const;
  std::string text() const;
};

/// A parsed scenario file.
///
///   # comment
///   n_t = 4
///   snr = 5 dB              (or a linear value)
///   power_2 = 10            (linear, or "<x> dB")
///   tx_corr_1 = exp 0.4     (identity | exp <t> | [[1, 0.4], [0.4, 1]])
///   p_grid = 0:0.05:1       (or [0, 0.5, 1]; `p` for a single point)
///   game = tpa
///   mc.trials = 20000
struct ScenarioConfig {
  ChannelScenario scenario;
  CorrelationSpec rx_corr;
  CorrelationSpec tx_corr_1;
  CorrelationSpec tx_corr_2;
  Game game = Game::tpa;
  std::vector<double> p_grid;  ///< evaluation points; a single entry when `p` is given
  McConfig mc{20000, 1, 0};
  NeOptions solver;
  std::string output;  ///< CSV destination, empty for stdout
};

/// Throws ConfigError (with the offending line) on unknown keys, malformed values or an
/// inconsistent scenario.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Effective configuration in the input syntax; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ScenarioConfig& config);

/// 64-bit FNV-1a digest of the dumped config, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& config);

/// "start:step:stop" inclusive of stop (within half a step).
std::vector<double> parse_range(std::string_view text);

}  // namespace mimomac
