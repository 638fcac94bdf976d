// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include "mimomac/channel.hpp"
#include "mimomac/profiles.hpp"

namespace mimomac {

/// Solution (gamma, delta) of a deterministic-equivalent system.
struct FixedPoint {
  double gamma = 0.0;
  double delta = 0.0;
  double residual = 0.0;  ///< max absolute defect of the two defining equations
  int iterations = 0;
};

struct FixedPointOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
  double damping = 0.5;
  /// Re-solve from extra starting points and require agreement to `restart_agreement`.
  bool verify_restarts = true;
  double restart_agreement = 1e-8;
};

/// Generic system with normalisation `norm` and coupling `coupling`:
///   gamma = (1/norm) sum_j d_R(j) / (1 + coupling eta d_R(j) delta)
///   delta = (1/norm) sum_i w(i)   / (1 + coupling eta w(i) gamma)
/// Damped alternating substitution, falling back to bisection on gamma (the composed map is
/// monotone). Throws SolverError when neither reaches `tolerance`.
FixedPoint solve_fixed_point(std::span<const double> w, std::span<const double> d_r, double eta, double norm,
                             double coupling, const FixedPointOptions& opts = {});

/// Single-user system: norm n_t, coupling 1. `w` holds power-weighted transmit eigenvalues.
FixedPoint solve_fp_single(std::span<const double> w, std::span<const double> d_r, double eta, std::size_t n_t,
                           const FixedPointOptions& opts = {});

/// Two-user virtual-MIMO system: norm 2 n_t, coupling 2, delta sums both users' terms.
FixedPoint solve_fp_joint(std::span<const double> w_1, std::span<const double> w_2, std::span<const double> d_r,
                          double eta, std::size_t n_t, const FixedPointOptions& opts = {});

/// Deterministic-equivalent rate (bits) at a solved fixed point:
///   sum_i log2(1 + c eta w_i gamma) + sum_j log2(1 + c eta d_R(j) delta) - norm c eta gamma delta log2(e).
double equivalent_rate(std::span<const double> w, std::span<const double> d_r, double eta, double norm,
                       double coupling, const FixedPoint& fp);

/// Descending eigenvalues of R, T_1, T_2.
struct Spectra {
  std::vector<double> rx;
  std::vector<double> tx1;
  std::vector<double> tx2;

  const std::vector<double>& tx(int user) const { return user == 1 ? tx1 : tx2; }
};

Spectra spectra(const ChannelScenario& scenario);

/// Approximated rates R~_k^(s), indexed [user - 1][state - 1].
struct ApproxRates {
  std::array<std::array<double, kStates>, 2> rate{};

  double at(int user, int state) const { return rate[user - 1][state - 1]; }
  double utility(int user, double p) const { return p * at(user, 1) + (1.0 - p) * at(user, 2); }
  double state_sum(int state) const { return at(1, state) + at(2, state); }
};

/// One value per user (rates of a state, or utilities).
struct UserRates {
  double r1 = 0.0;
  double r2 = 0.0;
  double of(int user) const { return user == 1 ? r1 : r2; }
};

/// Large-system model of one scenario: caches the spectra and evaluates every approximated rate.
class LargeSystemModel {
 public:
  explicit LargeSystemModel(const ChannelScenario& scenario, FixedPointOptions opts = {});

  const ChannelScenario& scenario() const noexcept { return scenario_; }
  const Spectra& spectra() const noexcept { return spectra_; }
  const FixedPointOptions& options() const noexcept { return opts_; }

  /// Power-weighted eigenvalues w_i = powers_i * d_k(i); `powers` either has one entry (uniform)
  /// or n_t entries.
  std::vector<double> weights(int user, std::span<const double> powers) const;

  FixedPoint single_fixed_point(std::span<const double> w) const;
  FixedPoint joint_fixed_point(std::span<const double> w_1, std::span<const double> w_2) const;
  double single_rate(std::span<const double> w) const;
  double joint_rate(std::span<const double> w_1, std::span<const double> w_2) const;

  /// Rates of `state` for per-antenna powers of both users (decoded-last user = `state`).
  UserRates state_rates(std::span<const double> powers_1, std::span<const double> powers_2, int state) const;

  ApproxRates tpa_rates(const TpaProfile& profile) const;
  double tpa_utility(const TpaProfile& profile, int user) const;
  /// Analytic d u~_k / d alpha_k (the rate expressions are stationary in gamma and delta).
  double tpa_utility_derivative(const TpaProfile& profile, int user) const;

 private:
  ChannelScenario scenario_;
  Spectra spectra_;
  FixedPointOptions opts_;
};

/// R~_k^(s) for a TPA profile (alpha_1, alpha_2) at the scenario's p.
ApproxRates approx_rates_tpa(const ChannelScenario& scenario, double alpha_1, double alpha_2);

/// R~_1^(s), R~_2^(s) for eigen-loadings in one state.
UserRates approx_rates_spa(const ChannelScenario& scenario, const EigenLoading& loading_1,
                            const EigenLoading& loading_2, int state);

/// Positive root of (1/(factor n_t)) sum_j d_R(j) / (gamma + d_R(j)) = 1 (high-SNR limit of the
/// fixed point). Throws DomainError when no positive root exists.
double high_snr_gamma(std::span<const double> d_r, std::size_t n_t, int factor);

/// Low-SNR utilities u~_k = (1/n_t) eta P_k sum d_R sum d_k^T log2(e); independent of the
/// profile and of p.
UserRates low_snr_rates(const ChannelScenario& scenario, double alpha_1, double alpha_2);

}  // namespace mimomac
