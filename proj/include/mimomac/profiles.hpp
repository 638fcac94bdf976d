// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace mimomac {

/// Coordination states: in state s, user s is decoded last (sees no interference).
inline constexpr int kStates = 2;

/// Temporal power allocation. alpha_1 is user 1's fraction in state 1, alpha_2 user 2's in
/// state 2; the off-state fractions follow from saturating p a^(1) + (1-p) a^(2) = 1.
/// At p in {0, 1} the off-state fraction of the affected user is irrelevant and reported as 0.
class TpaProfile {
 public:
  /// Throws ConstraintError when alpha_k lies outside [0, 1/p_k].
  TpaProfile(double alpha_1, double alpha_2, double p);

  double alpha_1() const noexcept { return alpha_1_; }
  double alpha_2() const noexcept { return alpha_2_; }
  double p() const noexcept { return p_; }
  double own(int user) const noexcept { return user == 1 ? alpha_1_ : alpha_2_; }

  /// Power fraction of `user` in `state`.
  double fraction(int user, int state) const noexcept;

  /// Upper end of user k's action set, 1/p_k (infinity when p_k = 0).
  static double action_upper(int user, double p) noexcept;

 private:
  double alpha_1_;
  double alpha_2_;
  double p_;
};

/// Per-eigenmode powers P(1..n_t) in the eigenbasis of the user's transmit correlation.
struct EigenLoading {
  std::vector<double> powers;

  double total() const noexcept;
  /// Throws ConstraintError unless all powers >= 0 and sum <= n_t * power + 1e-9.
  void check_feasible(std::size_t n_t, double power, int user, int state) const;

  static EigenLoading uniform(std::size_t n_t, double power);
};

/// Spatial power allocation: one loading per (user, state).
struct SpaProfile {
  std::array<std::array<EigenLoading, kStates>, 2> loadings;

  const EigenLoading& at(int user, int state) const { return loadings[user - 1][state - 1]; }
  EigenLoading& at(int user, int state) { return loadings[user - 1][state - 1]; }
};

}  // namespace mimomac
