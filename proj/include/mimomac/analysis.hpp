// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mimomac/games.hpp"
#include "mimomac/rates.hpp"

namespace mimomac {

/// Sum-rate of the virtual MIMO network with both users at full uniform power.
Estimate centralized_sumrate_tpa(const ChannelScenario& scenario, const McConfig& mc);

struct CentralizedSpa {
  StateLoadings loadings;
  Estimate sumrate;
  double approx_sumrate = 0.0;
  double start_spread = 0.0;  ///< largest loading difference between the three starts
};

/// Joint maximisation of E log2 det(I + eta sum_k H_k Q_k H_k^H) over both eigen-loadings.
/// Throws SolverError when any start fails to converge.
CentralizedSpa centralized_sumrate_spa(const ChannelScenario& scenario, const McConfig& mc,
                                       const NeOptions& opts = {});

/// TPA equilibrium sum-rate along a p grid. All points share the same channel draws, so
/// differences between points (gaps, second differences) carry common-random-number errors.
struct SweepResult {
  std::vector<double> p;
  std::vector<TpaProfile> profiles;
  std::vector<Estimate> ne_sumrate;
  std::vector<Estimate> user1;
  std::vector<Estimate> user2;
  std::vector<Estimate> gap;  ///< centralized minus NE sum-rate
  Estimate centralized;
  /// Entry i is the second difference centred on grid point i + 1.
  std::vector<Estimate> second_differences;

  /// (max - min) / max of the NE sum-rate means.
  double relative_spread() const;
  /// Centralized over NE sum-rate at grid point i.
  double price_of_anarchy(std::size_t i) const { return centralized.mean / ne_sumrate[i].mean; }
};

/// Throws DomainError unless the grid is strictly increasing inside [0, 1].
void check_p_grid(std::span<const double> p_grid);

SweepResult tpa_sumrate_sweep(const ChannelScenario& scenario, std::span<const double> p_grid, const McConfig& mc,
                              const NeOptions& opts = {});

/// TPA equilibrium sum-rates under fair (p = 1/2) and unfair (p = 0) SIC against single-user
/// decoding with both users at full uniform power, on shared draws.
struct DecoderComparison {
  TpaProfile fair_profile{1.0, 1.0, 0.5};
  Estimate sic_fair;
  Estimate sic_unfair;
  Estimate sud;
  Estimate fair_minus_sud;
};

DecoderComparison compare_decoders(const ChannelScenario& scenario, const McConfig& mc, const NeOptions& opts = {});

/// R_sum^NE(p) = a p + b for the SPA game.
struct LineCoefficients {
  Estimate a;
  Estimate b;
};

/// a = E[J^(1) - J^(2)], b = E[J^(2)] at the equilibrium precoders, J^(s) the joint log-det.
LineCoefficients spa_line_coeffs(const ChannelScenario& scenario, const McConfig& mc, const NeOptions& opts = {});

/// Base-station choice of p from the line: 1 if a > 0, else 0.
double stackelberg_p(const LineCoefficients& coeffs);

/// SPA sum-rate along a p grid, each point solved and measured on its own draws, compared with the
/// fitted line.
struct SpaLineSweep {
  LineCoefficients coeffs;
  std::vector<double> p;
  std::vector<Estimate> sumrate;
  std::vector<Estimate> residual;  ///< measured minus a p + b; error combines both estimates
  Estimate centralized;
};

SpaLineSweep spa_line_sweep(const ChannelScenario& scenario, std::span<const double> p_grid, const McConfig& mc,
                            const NeOptions& opts = {});

struct RegionPoint {
  double p = 0.0;
  Estimate rate_1;
  Estimate rate_2;
};

/// SIC rate pairs at the SPA equilibrium for every p, plus the single-user-decoding pair at the
/// sum-rate maximising loadings.
struct RateRegion {
  std::vector<RegionPoint> sic;
  RegionPoint sud;
  Estimate centralized;
  /// Largest distance (bits) of an interior point from the chord joining the end points.
  double chord_deviation = 0.0;
};

RateRegion rate_region(const ChannelScenario& scenario, std::span<const double> p_grid, const McConfig& mc,
                       const NeOptions& opts = {});

/// One property check over many random instances.
struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t instances = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  ///< smallest observed value of the quantity required to be >= 0
  std::string counterexample;
};

inline constexpr double kPropertySlack = 1e-10;

/// Tr{(A''-A')[(I+A')^-1 - (I+A'')^-1] + (B''-B')[(I+B'+A')^-1 - (I+B''+A'')^-1]} (natural log
/// units), the quantity required to be >= 0 for the uniqueness argument.
double lemma_trace(const CMatrix& a1, const CMatrix& a2, const CMatrix& b1, const CMatrix& b2);

/// Tr[(X - Y)(Y^-1 - X^-1)] for positive definite X, Y.
double inverse_difference_trace(const CMatrix& x, const CMatrix& y);

/// Diagonally-strict-concavity margin of one channel draw (G_k = H_k H_k^H) for the profile pairs
/// (alpha_1', alpha_2') and (alpha_1'', alpha_2'').
struct DscMargin {
  double state_1 = 0.0;     ///< T^(1)
  double state_2 = 0.0;     ///< T^(2)
  double combined = 0.0;    ///< p T^(1) + (1 - p) T^(2)
  double derivative = 0.0;  ///< the same margin from the utilities' own-derivatives
};

DscMargin dsc_margin(const CMatrix& g1, const CMatrix& g2, double rho_1, double rho_2, double p,
                     const double (&alpha_1)[2], const double (&alpha_2)[2]);

/// Diagonally strict concavity of the TPA game: for random draws, p and pairs of profiles, the
/// margin C = p T^(1) + (1 - p) T^(2) built from the A', A'', B', B'' matrices. Also checks that C
/// matches the derivative form of the condition.
CheckResult verify_dsc(const ChannelScenario& scenario, std::size_t trials, std::uint64_t seed);

/// Trace inequalities behind the uniqueness proof; one result per lemma plus the
/// ordered-eigenvalue bound.
std::vector<CheckResult> verify_trace_lemmas(std::size_t trials, std::size_t dim, std::uint64_t seed);

/// Own-variable concavity of both users' utilities: negative second differences on an alpha grid,
/// for the large-system utilities and for the Monte Carlo ones (shared draws).
std::vector<CheckResult> verify_concavity(const ChannelScenario& scenario, double step, const McConfig& mc);

}  // namespace mimomac
