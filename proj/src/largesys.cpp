// SPDX-License-Identifier: Apache-2.0
#include "mimomac/largesys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "mimomac/errors.hpp"
#include "mimomac/hermitian.hpp"

namespace mimomac {

namespace {

constexpr double kLog2e = std::numbers::log2e;

struct System {
  std::span<const double> w;
  std::span<const double> d_r;
  double eta;
  double norm;
  double coupling;

  double gamma_map(double delta) const {
    double s = 0.0;
    for (double d : d_r) s += d / (1.0 + coupling * eta * d * delta);
    return s / norm;
  }
  double delta_map(double gamma) const {
    double s = 0.0;
    for (double v : w) s += v / (1.0 + coupling * eta * v * gamma);
    return s / norm;
  }
  double gamma_slope(double delta) const {
    double s = 0.0;
    for (double d : d_r) {
      const double den = 1.0 + coupling * eta * d * delta;
      s -= coupling * eta * d * d / (den * den);
    }
    return s / norm;
  }
  double delta_slope(double gamma) const {
    double s = 0.0;
    for (double v : w) {
      const double den = 1.0 + coupling * eta * v * gamma;
      s -= coupling * eta * v * v / (den * den);
    }
    return s / norm;
  }
  double residual(double gamma, double delta) const {
    return std::max(std::abs(gamma - gamma_map(delta)), std::abs(delta - delta_map(gamma)));
  }
};

bool damped(const System& sys, double gamma, double delta, const FixedPointOptions& opts, FixedPoint& out) {
  const double beta = opts.damping;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    gamma = (1.0 - beta) * gamma + beta * sys.gamma_map(delta);
    delta = (1.0 - beta) * delta + beta * sys.delta_map(gamma);
    const double r = sys.residual(gamma, delta);
    if (r < opts.tolerance) {
      out = {gamma, delta, r, it};
      return true;
    }
    if (!std::isfinite(r)) return false;
  }
  return false;
}

// gamma -> gamma_map(delta_map(gamma)) is nondecreasing, so gamma_map(delta_map(g)) - g changes
// sign exactly once on [0, gamma_max] for the systems handled here.
FixedPoint bisect(const System& sys, const FixedPointOptions& opts) {
  double lo = 0.0;
  double hi = sys.gamma_map(0.0);
  int it = 0;
  for (; it < 400 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sys.gamma_map(sys.delta_map(mid)) - mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick the endpoint with the smaller defect.
  FixedPoint best{};
  best.residual = std::numeric_limits<double>::infinity();
  for (double g : {lo, hi}) {
    const double d = sys.delta_map(g);
    const double r = sys.residual(g, d);
    if (r < best.residual) best = {g, d, r, it};
  }
  if (!(best.residual < opts.tolerance)) {
    throw SolverError("fixed point: bisection fallback stalled at residual " + std::to_string(best.residual),
                      best.residual);
  }
  return best;
}

// Newton steps on the 2x2 system; a small residual alone does not pin down the root when the
// substitution map contracts slowly.
void polish(const System& sys, FixedPoint& fp) {
  for (int it = 0; it < 8; ++it) {
    const double f1 = fp.gamma - sys.gamma_map(fp.delta);
    const double f2 = fp.delta - sys.delta_map(fp.gamma);
    const double b = -sys.gamma_slope(fp.delta);
    const double c = -sys.delta_slope(fp.gamma);
    const double det = 1.0 - b * c;
    if (!(std::abs(det) > 1e-300)) return;
    const double g = std::max(0.0, fp.gamma - (f1 - b * f2) / det);
    const double d = std::max(0.0, fp.delta - (f2 - c * f1) / det);
    const double r = sys.residual(g, d);
    if (!(r < fp.residual)) return;
    fp.gamma = g;
    fp.delta = d;
    fp.residual = r;
  }
}

FixedPoint solve_from(const System& sys, double gamma, double delta, const FixedPointOptions& opts) {
  FixedPoint fp;
  if (!damped(sys, gamma, delta, opts, fp)) fp = bisect(sys, opts);
  polish(sys, fp);
  return fp;
}

}  // namespace

FixedPoint solve_fixed_point(std::span<const double> w, std::span<const double> d_r, double eta, double norm,
                             double coupling, const FixedPointOptions& opts) {
  if (!(eta >= 0.0)) throw DomainError("fixed point: eta must be >= 0");
  if (!(norm > 0.0)) throw DomainError("fixed point: normalisation must be positive");
  for (double v : w)
    if (!(v >= 0.0)) throw DomainError("fixed point: weighted transmit eigenvalues must be >= 0");
  for (double v : d_r)
    if (!(v >= 0.0)) throw DomainError("fixed point: receive eigenvalues must be >= 0");

  const System sys{w, d_r, eta, norm, coupling};
  const double gamma_max = sys.gamma_map(0.0);
  const double delta_max = sys.delta_map(0.0);

  const FixedPoint fp = solve_from(sys, gamma_max, sys.delta_map(gamma_max), opts);
  if (opts.verify_restarts) {
    const double starts[3][2] = {{0.0, 0.0}, {gamma_max, 0.0}, {0.0, delta_max}};
    for (const auto& st : starts) {
      const FixedPoint alt = solve_from(sys, st[0], st[1], opts);
      const double gap = std::max(std::abs(alt.gamma - fp.gamma), std::abs(alt.delta - fp.delta));
      if (gap > opts.restart_agreement) {
        std::ostringstream msg;
        msg << "fixed point: restarts disagree by " << std::scientific << gap;
        throw SolverError(msg.str(), gap);
      }
    }
  }
  return fp;
}

FixedPoint solve_fp_single(std::span<const double> w, std::span<const double> d_r, double eta, std::size_t n_t,
                           const FixedPointOptions& opts) {
  return solve_fixed_point(w, d_r, eta, static_cast<double>(n_t), 1.0, opts);
}

FixedPoint solve_fp_joint(std::span<const double> w_1, std::span<const double> w_2, std::span<const double> d_r,
                          double eta, std::size_t n_t, const FixedPointOptions& opts) {
  std::vector<double> w(w_1.begin(), w_1.end());
  w.insert(w.end(), w_2.begin(), w_2.end());
  return solve_fixed_point(w, d_r, eta, 2.0 * static_cast<double>(n_t), 2.0, opts);
}

double equivalent_rate(std::span<const double> w, std::span<const double> d_r, double eta, double norm,
                       double coupling, const FixedPoint& fp) {
  double r = 0.0;
  for (double v : w) r += std::log2(1.0 + coupling * eta * v * fp.gamma);
  for (double d : d_r) r += std::log2(1.0 + coupling * eta * d * fp.delta);
  r -= norm * coupling * eta * fp.gamma * fp.delta * kLog2e;
  return r;
}

Spectra spectra(const ChannelScenario& scenario) {
  auto clamp = [](std::vector<double> v) {
    for (auto& x : v) x = std::max(x, 0.0);
    return v;
  };
  return {clamp(hermitian_eigenvalues(scenario.rx_corr)), clamp(hermitian_eigenvalues(scenario.tx_corr_1)),
          clamp(hermitian_eigenvalues(scenario.tx_corr_2))};
}

LargeSystemModel::LargeSystemModel(const ChannelScenario& scenario, FixedPointOptions opts)
    : scenario_(scenario), spectra_(mimomac::spectra(scenario)), opts_(opts) {
  scenario_.validate();
}

std::vector<double> LargeSystemModel::weights(int user, std::span<const double> powers) const {
  const auto& d = spectra_.tx(user);
  if (powers.size() != 1 && powers.size() != d.size()) {
    throw DomainError("loading length " + std::to_string(powers.size()) + " does not match n_t");
  }
  std::vector<double> w(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) w[i] = (powers.size() == 1 ? powers[0] : powers[i]) * d[i];
  return w;
}

FixedPoint LargeSystemModel::single_fixed_point(std::span<const double> w) const {
  return solve_fp_single(w, spectra_.rx, scenario_.eta, scenario_.n_t, opts_);
}

FixedPoint LargeSystemModel::joint_fixed_point(std::span<const double> w_1, std::span<const double> w_2) const {
  return solve_fp_joint(w_1, w_2, spectra_.rx, scenario_.eta, scenario_.n_t, opts_);
}

double LargeSystemModel::single_rate(std::span<const double> w) const {
  const double n = static_cast<double>(scenario_.n_t);
  return equivalent_rate(w, spectra_.rx, scenario_.eta, n, 1.0, single_fixed_point(w));
}

double LargeSystemModel::joint_rate(std::span<const double> w_1, std::span<const double> w_2) const {
  std::vector<double> w(w_1.begin(), w_1.end());
  w.insert(w.end(), w_2.begin(), w_2.end());
  const double n = 2.0 * static_cast<double>(scenario_.n_t);
  return equivalent_rate(w, spectra_.rx, scenario_.eta, n, 2.0, joint_fixed_point(w_1, w_2));
}

UserRates LargeSystemModel::state_rates(std::span<const double> powers_1, std::span<const double> powers_2,
                                        int state) const {
  if (state != 1 && state != 2) throw DomainError("invalid coordination state " + std::to_string(state));
  const auto w1 = weights(1, powers_1);
  const auto w2 = weights(2, powers_2);
  const double last = single_rate(state == 1 ? w1 : w2);
  const double joint = joint_rate(w1, w2);
  return state == 1 ? UserRates{last, joint - last} : UserRates{joint - last, last};
}

ApproxRates LargeSystemModel::tpa_rates(const TpaProfile& profile) const {
  ApproxRates out;
  for (int s = 1; s <= kStates; ++s) {
    const double p1[1] = {profile.fraction(1, s) * scenario_.power_1};
    const double p2[1] = {profile.fraction(2, s) * scenario_.power_2};
    const auto r = state_rates(p1, p2, s);
    out.rate[0][s - 1] = r.r1;
    out.rate[1][s - 1] = r.r2;
  }
  return out;
}

double LargeSystemModel::tpa_utility(const TpaProfile& profile, int user) const {
  return tpa_rates(profile).utility(user, profile.p());
}

double LargeSystemModel::tpa_utility_derivative(const TpaProfile& profile, int user) const {
  const double p = profile.p();
  const double pk = user == 1 ? p : 1.0 - p;
  if (pk == 0.0) return 0.0;
  const double eta = scenario_.eta;
  const double power = scenario_.power(user);
  const auto& d = spectra_.tx(user);

  // Own state: interference-free single-user rate.
  const double a = profile.own(user);
  const double own_power[1] = {a * power};
  const auto fp_single = single_fixed_point(weights(user, own_power));
  double own_slope = 0.0;
  for (double di : d) own_slope += eta * power * di * fp_single.gamma / (1.0 + eta * a * power * di * fp_single.gamma);
  own_slope *= kLog2e;
  if (pk == 1.0) return own_slope;

  // Other state: joint term, with d(off fraction)/d(alpha_k) = -p_k / (1 - p_k).
  const int other = 3 - user;
  const double off = profile.fraction(user, other);
  const double p1[1] = {profile.fraction(1, other) * scenario_.power_1};
  const double p2[1] = {profile.fraction(2, other) * scenario_.power_2};
  const auto fp_joint = joint_fixed_point(weights(1, p1), weights(2, p2));
  double joint_slope = 0.0;
  for (double di : d)
    joint_slope += 2.0 * eta * power * di * fp_joint.gamma / (1.0 + 2.0 * eta * off * power * di * fp_joint.gamma);
  joint_slope *= kLog2e;
  return pk * (own_slope - joint_slope);
}

ApproxRates approx_rates_tpa(const ChannelScenario& scenario, double alpha_1, double alpha_2) {
  return LargeSystemModel(scenario).tpa_rates(TpaProfile(alpha_1, alpha_2, scenario.p));
}

UserRates approx_rates_spa(const ChannelScenario& scenario, const EigenLoading& loading_1,
                           const EigenLoading& loading_2, int state) {
  loading_1.check_feasible(scenario.n_t, scenario.power_1, 1, state);
  loading_2.check_feasible(scenario.n_t, scenario.power_2, 2, state);
  return LargeSystemModel(scenario).state_rates(loading_1.powers, loading_2.powers, state);
}

double high_snr_gamma(std::span<const double> d_r, std::size_t n_t, int factor) {
  if (factor != 1 && factor != 2) throw DomainError("high_snr_gamma: factor must be 1 or 2");
  const double norm = static_cast<double>(factor) * static_cast<double>(n_t);
  auto lhs = [&](double g) {
    double s = 0.0;
    for (double d : d_r) s += d / (g + d);
    return s / norm;
  };
  // As gamma -> 0+ the left side tends to (number of nonzero d_R) / norm and decreases after.
  const double positive = static_cast<double>(std::count_if(d_r.begin(), d_r.end(), [](double d) { return d > 0.0; }));
  if (positive / norm <= 1.0) {
    throw DomainError("high_snr_gamma: no positive root (needs more than " + std::to_string(norm) +
                      " nonzero receive eigenvalues)");
  }
  double lo = 0.0;
  double hi = std::accumulate(d_r.begin(), d_r.end(), 0.0) / norm;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lhs(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(lhs(lo) - 1.0) < std::abs(lhs(hi) - 1.0) ? lo : hi;
}

UserRates low_snr_rates(const ChannelScenario& scenario, double /*alpha_1*/, double /*alpha_2*/) {
  const auto sp = spectra(scenario);
  const double sum_r = std::accumulate(sp.rx.begin(), sp.rx.end(), 0.0);
  const double n = static_cast<double>(scenario.n_t);
  auto u = [&](int k) {
    const auto& d = sp.tx(k);
    return scenario.eta * scenario.power(k) * sum_r * std::accumulate(d.begin(), d.end(), 0.0) * kLog2e / n;
  };
  return {u(1), u(2)};
}

}  // namespace mimomac
