// SPDX-License-Identifier: Apache-2.0
#include "mimomac/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mimomac/errors.hpp"
#include "mimomac/random.hpp"

namespace mimomac {

void McConfig::validate() const {
  if (trials < 1) throw DomainError("McConfig: trials must be >= 1");
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate McSamples::estimate(std::size_t output) const {
  std::vector<double> w(outputs_, 0.0);
  w[output] = 1.0;
  return combine(w);
}

Estimate McSamples::combine(std::span<const double> weights) const {
  if (weights.size() != outputs_) throw DomainError("McSamples::combine: weight count mismatch");
  std::vector<double> col(trials_);
  for (std::size_t t = 0; t < trials_; ++t) {
    double v = 0.0;
    for (std::size_t j = 0; j < outputs_; ++j)
      if (weights[j] != 0.0) v += weights[j] * data_[t * outputs_ + j];
    col[t] = v;
  }
  const double n = static_cast<double>(trials_);
  const double mean = pairwise_sum(col) / n;
  if (trials_ < 2) return {mean, 0.0};
  for (auto& v : col) v = (v - mean) * (v - mean);
  const double var = pairwise_sum(col) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  unsigned threads = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

McSamples sample_trials(const ChannelSampler& sampler, const McConfig& mc, std::size_t outputs, const PerDrawFn& fn) {
  mc.validate();
  McSamples samples(mc.trials, outputs);
  parallel_for(mc.trials, mc.workers, [&](std::size_t t) {
    const ChannelDraw draw = sampler.draw(trial_seed(mc.master_seed, t));
    fn(draw, samples.row(t));
  });
  return samples;
}

McSamples sample_trials(const ChannelScenario& scenario, const McConfig& mc, std::size_t outputs, const PerDrawFn& fn) {
  return sample_trials(ChannelSampler(scenario), mc, outputs, fn);
}

}  // namespace mimomac
