// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

#include "mimomac/hermitian.hpp"
#include "mimomac/matrix.hpp"

namespace mimomac {

/// Static two-user MIMO MAC problem data. Powers and SNR are linear.
struct ChannelScenario {
  std::size_t n_t = 4;
  std::size_t n_r = 4;
  double eta = 1.0;      ///< inverse noise power 1/sigma^2
  double power_1 = 1.0;  ///< per-antenna budget P_1
  double power_2 = 1.0;  ///< per-antenna budget P_2
  HermitianMatrix rx_corr = HermitianMatrix::identity(4);
  HermitianMatrix tx_corr_1 = HermitianMatrix::identity(4);
  HermitianMatrix tx_corr_2 = HermitianMatrix::identity(4);
  double p = 0.5;  ///< Pr[S = 1], user 1 decoded last

  double power(int user) const { return user == 1 ? power_1 : power_2; }
  const HermitianMatrix& tx_corr(int user) const { return user == 1 ? tx_corr_1 : tx_corr_2; }

  /// Throws DomainError describing the first violated invariant.
  void validate() const;

  /// Identity correlations, n_t = n_r = n.
  static ChannelScenario uncorrelated(std::size_t n, double eta, double power_1, double power_2, double p);
};

/// One fading realisation (H_1, H_2), each n_r x n_t.
struct ChannelDraw {
  CMatrix h1;
  CMatrix h2;
  std::uint64_t seed = 0;

  const CMatrix& h(int user) const { return user == 1 ? h1 : h2; }
};

/// Kronecker channel synthesiser H_k = R^{1/2} Theta_k T_k^{1/2}, Theta_k i.i.d. CN(0, 1/n_t).
/// Square roots are computed once; `draw` is a pure function of the seed.
class ChannelSampler {
 public:
  explicit ChannelSampler(const ChannelScenario& scenario);

  ChannelDraw draw(std::uint64_t seed) const;
  const ChannelScenario& scenario() const noexcept { return scenario_; }

 private:
  CMatrix shape(const CMatrix& theta, int user) const;

  ChannelScenario scenario_;
  CMatrix rx_sqrt_;
  CMatrix tx_sqrt_1_;
  CMatrix tx_sqrt_2_;
  bool rx_identity_;
  bool tx_identity_1_;
  bool tx_identity_2_;
};

ChannelDraw draw_channels(const ChannelScenario& scenario, std::uint64_t seed);

double db_to_linear(double db);

}  // namespace mimomac
