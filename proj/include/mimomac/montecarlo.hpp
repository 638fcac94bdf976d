// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mimomac/channel.hpp"

namespace mimomac {

struct McConfig {
  std::size_t trials = 2000;
  std::uint64_t master_seed = 1;
  unsigned workers = 0;  ///< 0: hardware concurrency

  void validate() const;
};

/// Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Per-trial samples of several jointly drawn quantities (one row per trial). Because every
/// column comes from the same channel draws, linear combinations carry common-random-number
/// standard errors via `combine`.
class McSamples {
 public:
  McSamples(std::size_t trials, std::size_t outputs) : trials_(trials), outputs_(outputs), data_(trials * outputs) {}

  std::size_t trials() const noexcept { return trials_; }
  std::size_t outputs() const noexcept { return outputs_; }
  std::span<double> row(std::size_t trial) { return {data_.data() + trial * outputs_, outputs_}; }
  double at(std::size_t trial, std::size_t output) const { return data_[trial * outputs_ + output]; }

  Estimate estimate(std::size_t output) const;
  /// Estimate of sum_j weights[j] * column_j, evaluated per trial.
  Estimate combine(std::span<const double> weights) const;

 private:
  std::size_t trials_;
  std::size_t outputs_;
  std::vector<double> data_;
};

using PerDrawFn = std::function<void(const ChannelDraw&, std::span<double>)>;

/// Runs `fn` on draws seeded trial_seed(master_seed, t) for t < trials. Output does not depend
/// on the worker count.
McSamples sample_trials(const ChannelSampler& sampler, const McConfig& mc, std::size_t outputs, const PerDrawFn& fn);
McSamples sample_trials(const ChannelScenario& scenario, const McConfig& mc, std::size_t outputs, const PerDrawFn& fn);

/// Pairwise (cascade) summation; fixed reduction tree for a given length.
double pairwise_sum(std::span<const double> values);

/// Runs fn(i) for i < count over `workers` threads (0: hardware concurrency).
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace mimomac
