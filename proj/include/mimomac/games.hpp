// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimomac/largesys.hpp"
#include "mimomac/profiles.hpp"

namespace mimomac {

struct BestResponseOptions {
  double arg_tolerance = 1e-12;
  /// Utility range (bits) over the action set below which the response is the tie-break value 1.
  double flat_tolerance = 1e-9;
};

struct NeOptions {
  double tolerance = 1e-10;  ///< profile movement per round that counts as converged
  int max_rounds = 500;
  bool verify = true;  ///< run the deviation grid and the multi-start witness
  double deviation_step = 1e-3;
  BestResponseOptions best_response{};
};

/// Equilibrium of the temporal game on approximated utilities.
struct TpaNeResult {
  TpaProfile profile{1.0, 1.0, 0.5};
  UserRates utilities;
  ApproxRates rates;
  int rounds = 0;
  bool converged = false;
  double residual = 0.0;        ///< largest unilateral gain on the deviation grid (bits)
  double restart_spread = 0.0;  ///< max distance between equilibria reached from distinct starts
};

/// Equilibrium of the spatial game; loadings are solved per state and do not depend on p.
struct SpaNeResult {
  SpaProfile profile;
  ApproxRates rates;
  UserRates utilities;  ///< at the scenario's p
  int rounds = 0;
  bool converged = false;
  double residual = 0.0;
  double restart_spread = 0.0;
};

/// argmax over alpha_k in [0, 1/p_k] of u~_k, found by bisection on the analytic derivative.
/// Returns 1 when the utility is flat to `flat_tolerance` over the action set; returns 1 when
/// p_k = 1 and 0 when p_k = 0 (single-state degenerate games).
double tpa_best_response(const LargeSystemModel& model, int user, double opponent_alpha,
                         const BestResponseOptions& opts = {});
double tpa_best_response(const ChannelScenario& scenario, int user, double opponent_alpha);

/// Alternating best responses from (1, 1), cross-checked from (0, 0) and the upper corner.
/// Throws SolverError when the iteration does not settle within max_rounds.
TpaNeResult solve_ne_tpa(const ChannelScenario& scenario, const NeOptions& opts = {});
TpaNeResult solve_ne_tpa(const LargeSystemModel& model, const NeOptions& opts = {});

/// Largest gain of any user deviating unilaterally to a grid point of its action set (bits, >= 0).
double tpa_deviation_residual(const LargeSystemModel& model, const TpaProfile& profile, double step);

/// Water-filling P(i) = [mu - 1/(eta d_i gamma)]^+ with mu set so that sum P(i) = budget.
/// Throws DomainError when every d_i is zero and budget > 0, or when gamma/eta are not positive.
EigenLoading waterfill(std::span<const double> d_t, double gamma, double eta, double budget);

/// Per-state SPA equilibrium: the decoded-last user water-fills against the single-user fixed
/// point, the decoded-first user against the joint one (effective gain 2 gamma).
SpaNeResult solve_ne_spa(const ChannelScenario& scenario, const NeOptions& opts = {});
SpaNeResult solve_ne_spa(const LargeSystemModel& model, const NeOptions& opts = {});

/// Equilibrium loadings of one state starting from the given loadings.
struct StateLoadings {
  EigenLoading user1;
  EigenLoading user2;
  int rounds = 0;
  bool converged = false;

  const EigenLoading& of(int user) const { return user == 1 ? user1 : user2; }
};
StateLoadings solve_spa_state(const LargeSystemModel& model, int state, const EigenLoading& start_1,
                              const EigenLoading& start_2, const NeOptions& opts = {});

/// Largest gain of a user moving power between eigenmodes, in `state` (bits, >= 0).
double spa_deviation_residual(const LargeSystemModel& model, const StateLoadings& loadings, int state);

/// Simultaneous water-filling of both users against the joint fixed point: maximises the
/// approximated sum-rate log2 det(I + eta sum_k H_k Q_k H_k^H).
StateLoadings maximize_joint_rate(const LargeSystemModel& model, const EigenLoading& start_1,
                                  const EigenLoading& start_2, const NeOptions& opts = {});

/// Deterministic pseudo-random feasible loading (sums to n_t P_k), for multi-start checks.
EigenLoading random_loading(std::size_t n_t, double power, std::uint64_t seed);

}  // namespace mimomac
