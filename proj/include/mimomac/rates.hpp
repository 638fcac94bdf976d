// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>

#include "mimomac/channel.hpp"
#include "mimomac/hermitian.hpp"
#include "mimomac/montecarlo.hpp"
#include "mimomac/profiles.hpp"

namespace mimomac {

/// Monte Carlo rates in bits per channel use.
struct RatePair {
  Estimate r1;
  Estimate r2;
  Estimate sum;

  const Estimate& of(int user) const { return user == 1 ? r1 : r2; }
};

/// Precoders Q_k^(s), indexed [state - 1][user - 1].
using StatePrecoders = std::array<std::array<HermitianMatrix, 2>, kStates>;

/// Q with its square root F, so that H Q H^H = (H F)(H F)^H.
class Precoder {
 public:
  explicit Precoder(const HermitianMatrix& q);

  bool is_zero() const noexcept { return zero_; }
  /// eta * H Q H^H for one channel matrix.
  CMatrix covariance(const CMatrix& h, double eta) const;

 private:
  bool zero_ = true;
  bool scaled_identity_ = false;
  double scale_ = 0.0;
  CMatrix factor_;
};

/// log2 det(I + eta sum_k H_k Q_k H_k^H) for one draw; null precoders are absent.
double draw_logdet(const ChannelDraw& draw, double eta, const Precoder* q1, const Precoder* q2);

/// E log2 det(I + eta sum_k H_k Q_k H_k^H) with its standard error.
Estimate ergodic_logdet(const ChannelScenario& scenario, const std::optional<HermitianMatrix>& q1,
                        const std::optional<HermitianMatrix>& q2, const McConfig& mc);

/// SIC rates in `state` (user `state` decoded last). Shared draws for every expectation.
RatePair sic_rate_pair(const ChannelScenario& scenario, int state, const HermitianMatrix& q1, const HermitianMatrix& q2,
                       const McConfig& mc);

/// Single-user decoding: each user treats the other as noise.
RatePair sud_rate_pair(const ChannelScenario& scenario, const HermitianMatrix& q1, const HermitianMatrix& q2,
                       const McConfig& mc);

/// Q_k^(s) = alpha_k^(s) P_k I.
StatePrecoders tpa_precoders(const ChannelScenario& scenario, const TpaProfile& profile);
/// Q_k^(s) = U_k diag(P_k^(s)) U_k^H with U_k the eigenvectors of T_k (descending eigenvalues).
StatePrecoders spa_precoders(const ChannelScenario& scenario, const SpaProfile& profile);

/// Per-draw log-dets for both states. Columns: [J^(1), S_1^(1), S_2^(1), J^(2), S_1^(2), S_2^(2)]
/// where J is the joint term and S_k user k's interference-free term.
McSamples sample_state_logdets(const ChannelScenario& scenario, const StatePrecoders& q, const McConfig& mc);

namespace columns {
inline constexpr std::size_t kJoint[2] = {0, 3};
inline constexpr std::size_t kSingle1[2] = {1, 4};
inline constexpr std::size_t kSingle2[2] = {2, 5};
inline constexpr std::size_t kCount = 6;
}  // namespace columns

/// Weights over `sample_state_logdets` columns giving u_k = p R_k^(1) + (1 - p) R_k^(2).
std::array<double, columns::kCount> utility_weights(int user, double p);

/// Both users' coordination-averaged utilities on shared draws.
RatePair utilities(const ChannelScenario& scenario, const StatePrecoders& q, const McConfig& mc);

/// u_k for a TPA profile; throws ConstraintError when infeasible.
Estimate utility(const ChannelScenario& scenario, const TpaProfile& profile, int user, const McConfig& mc);
/// u_k for an SPA profile; throws ConstraintError when infeasible.
Estimate utility(const ChannelScenario& scenario, const SpaProfile& profile, int user, const McConfig& mc);

void check_feasible(const ChannelScenario& scenario, const SpaProfile& profile);

}  // namespace mimomac
