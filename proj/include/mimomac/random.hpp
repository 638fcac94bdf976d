// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "mimomac/matrix.hpp"

namespace mimomac {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The output is a pure function
/// of (key, counter), so independent substreams need no shared state.
class Philox {
 public:
  explicit Philox(std::uint64_t key) noexcept : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  /// Next 64 random bits.
  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1], 53-bit resolution.
  double next_open_unit() noexcept;
  /// Complex circular Gaussian with E|z|^2 = variance (Box-Muller).
  cplx next_complex_gaussian(double variance) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int available_ = 0;
};

/// SplitMix64 finaliser; used to decorrelate user-supplied master seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the independent substream for one Monte Carlo trial: mix64(master) XOR trial.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) noexcept {
  return mix64(master_seed) ^ trial;
}

}  // namespace mimomac
