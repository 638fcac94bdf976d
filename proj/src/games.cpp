// SPDX-License-Identifier: Apache-2.0
#include "mimomac/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "mimomac/errors.hpp"
#include "mimomac/random.hpp"

namespace mimomac {

namespace {

double p_of(int user, double p) { return user == 1 ? p : 1.0 - p; }

TpaProfile with_own(int user, double value, double opponent, double p) {
  return user == 1 ? TpaProfile(value, opponent, p) : TpaProfile(opponent, value, p);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Deviation scans evaluate thousands of profiles; uniqueness of each fixed point is already
// witnessed by the solver itself.
LargeSystemModel without_restarts(const LargeSystemModel& model) {
  FixedPointOptions opts = model.options();
  opts.verify_restarts = false;
  return LargeSystemModel(model.scenario(), opts);
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Temporal game

double tpa_best_response(const LargeSystemModel& model, int user, double opponent_alpha,
                         const BestResponseOptions& opts) {
  const double p = model.scenario().p;
  const double pk = p_of(user, p);
  if (pk == 0.0) return 0.0;
  if (pk == 1.0) return 1.0;
  const double hi = 1.0 / pk;

  auto slope = [&](double a) { return model.tpa_utility_derivative(with_own(user, a, opponent_alpha, p), user); };
  auto value = [&](double a) { return model.tpa_utility(with_own(user, a, opponent_alpha, p), user); };

  double best;
  if (slope(hi) >= 0.0) {
    best = hi;
  } else if (slope(0.0) <= 0.0) {
    best = 0.0;
  } else {
    double lo = 0.0;
    double up = hi;
    while (up - lo > opts.arg_tolerance) {
      const double mid = 0.5 * (lo + up);
      if (mid <= lo || mid >= up) break;
      (slope(mid) > 0.0 ? lo : up) = mid;
    }
    best = 0.5 * (lo + up);
  }

  const double u_best = value(best);
  const double u_lo = value(0.0);
  const double u_hi = value(hi);
  const double u_one = value(1.0);
  const double range = std::max({u_best, u_lo, u_hi, u_one}) - std::min({u_best, u_lo, u_hi, u_one});
  if (range < opts.flat_tolerance) return 1.0;
  return best;
}

double tpa_best_response(const ChannelScenario& scenario, int user, double opponent_alpha) {
  return tpa_best_response(LargeSystemModel(scenario), user, opponent_alpha);
}

double tpa_deviation_residual(const LargeSystemModel& full, const TpaProfile& profile, double step) {
  const LargeSystemModel model = without_restarts(full);
  const double p = profile.p();
  double worst = 0.0;
  for (int user : {1, 2}) {
    const double pk = p_of(user, p);
    if (pk == 0.0) continue;
    const double hi = TpaProfile::action_upper(user, p);
    const double opponent = profile.own(3 - user);
    const double base = model.tpa_utility(profile, user);
    const auto n = static_cast<long>(std::floor(hi / step + 1e-9));
    for (long i = 0; i <= n + 1; ++i) {
      const double a = std::min(hi, static_cast<double>(i) * step);
      worst = std::max(worst, model.tpa_utility(with_own(user, a, opponent, p), user) - base);
    }
  }
  return worst;
}

namespace {

struct TpaRun {
  double a1;
  double a2;
  int rounds;
  bool converged;
};

TpaRun run_best_responses(const LargeSystemModel& model, double a1, double a2, const NeOptions& opts) {
  for (int round = 1; round <= opts.max_rounds; ++round) {
    const double n1 = tpa_best_response(model, 1, a2, opts.best_response);
    const double n2 = tpa_best_response(model, 2, n1, opts.best_response);
    const double move = std::max(std::abs(n1 - a1), std::abs(n2 - a2));
    a1 = n1;
    a2 = n2;
    if (move < opts.tolerance) return {a1, a2, round, true};
  }
  return {a1, a2, opts.max_rounds, false};
}

}  // namespace

TpaNeResult solve_ne_tpa(const LargeSystemModel& model, const NeOptions& opts) {
  const double p = model.scenario().p;
  TpaNeResult out;

  if (p == 0.0 || p == 1.0) {
    // Single-state game: the user decoded last in the only state spends everything there.
    out.profile = p == 1.0 ? TpaProfile(1.0, 0.0, p) : TpaProfile(0.0, 1.0, p);
    out.converged = true;
  } else {
    const TpaRun run = run_best_responses(model, 1.0, 1.0, opts);
    if (!run.converged) {
      std::ostringstream msg;
      msg << "TPA best-response dynamics did not converge in " << opts.max_rounds << " rounds; last profile ("
          << run.a1 << ", " << run.a2 << ")";
      throw SolverError(msg.str(), std::numeric_limits<double>::quiet_NaN());
    }
    out.profile = TpaProfile(run.a1, run.a2, p);
    out.rounds = run.rounds;
    out.converged = true;
    if (opts.verify) {
      const double starts[2][2] = {{0.0, 0.0}, {1.0 / p, 1.0 / (1.0 - p)}};
      for (const auto& st : starts) {
        const TpaRun alt = run_best_responses(model, st[0], st[1], opts);
        if (!alt.converged) {
          throw SolverError("TPA best-response dynamics did not converge from an alternate start",
                            std::numeric_limits<double>::quiet_NaN());
        }
        out.restart_spread = std::max({out.restart_spread, std::abs(alt.a1 - run.a1), std::abs(alt.a2 - run.a2)});
      }
    }
  }

  out.rates = model.tpa_rates(out.profile);
  out.utilities = {out.rates.utility(1, p), out.rates.utility(2, p)};
  if (opts.verify) out.residual = tpa_deviation_residual(model, out.profile, opts.deviation_step);
  return out;
}

TpaNeResult solve_ne_tpa(const ChannelScenario& scenario, const NeOptions& opts) {
  return solve_ne_tpa(LargeSystemModel(scenario), opts);
}

// ---------------------------------------------------------------------------------------------
// Spatial game

EigenLoading waterfill(std::span<const double> d_t, double gamma, double eta, double budget) {
  if (!(budget >= 0.0)) throw DomainError("waterfill: budget must be >= 0");
  const std::size_t n = d_t.size();
  EigenLoading out{std::vector<double>(n, 0.0)};
  if (budget == 0.0) return out;
  if (!(gamma > 0.0) || !(eta > 0.0)) throw DomainError("waterfill: gamma and eta must be positive");

  // Floor levels 1/(eta d_i gamma); inactive eigenmodes (d_i = 0) never receive power.
  std::vector<double> floor(n, std::numeric_limits<double>::infinity());
  double lo = std::numeric_limits<double>::infinity();
  double hi_floor = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d_t[i] > 0.0) {
      floor[i] = 1.0 / (eta * d_t[i] * gamma);
      lo = std::min(lo, floor[i]);
      hi_floor = std::max(hi_floor, floor[i]);
    }
  }
  if (!std::isfinite(lo)) throw DomainError("waterfill: all eigenvalues are zero but the budget is positive");

  auto poured = [&](double level) {
    double s = 0.0;
    for (double f : floor)
      if (f < level) s += level - f;
    return s;
  };
  double hi = hi_floor + budget;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (poured(mid) < budget ? lo : hi) = mid;
  }

  // Close the budget exactly on the active set found by bisection.
  const double level = 0.5 * (lo + hi);
  double floor_sum = 0.0;
  std::size_t active = 0;
  for (double f : floor)
    if (f < level) {
      floor_sum += f;
      ++active;
    }
  if (active == 0) {
    // Only reachable when one mode is active right at the bracket edge.
    active = 1;
    floor_sum = lo;
  }
  const double water = (budget + floor_sum) / static_cast<double>(active);
  for (std::size_t i = 0; i < n; ++i) out.powers[i] = std::max(0.0, water - floor[i]);
  return out;
}

namespace {

EigenLoading best_single_response(const LargeSystemModel& model, int user, const EigenLoading& current) {
  const auto& sc = model.scenario();
  const auto fp = model.single_fixed_point(model.weights(user, current.powers));
  return waterfill(model.spectra().tx(user), fp.gamma, sc.eta, static_cast<double>(sc.n_t) * sc.power(user));
}

EigenLoading best_joint_response(const LargeSystemModel& model, int user, const EigenLoading& own,
                                 const EigenLoading& other) {
  const auto& sc = model.scenario();
  const auto w_own = model.weights(user, own.powers);
  const auto w_other = model.weights(3 - user, other.powers);
  const auto fp = user == 1 ? model.joint_fixed_point(w_own, w_other) : model.joint_fixed_point(w_other, w_own);
  return waterfill(model.spectra().tx(user), 2.0 * fp.gamma, sc.eta, static_cast<double>(sc.n_t) * sc.power(user));
}

bool trivial_game(const ChannelScenario& sc) { return sc.eta == 0.0; }

}  // namespace

StateLoadings solve_spa_state(const LargeSystemModel& model, int state, const EigenLoading& start_1,
                              const EigenLoading& start_2, const NeOptions& opts) {
  const auto& sc = model.scenario();
  StateLoadings out{start_1, start_2, 0, false};
  if (trivial_game(sc)) {
    out.user1 = EigenLoading::uniform(sc.n_t, sc.power_1);
    out.user2 = EigenLoading::uniform(sc.n_t, sc.power_2);
    out.converged = true;
    return out;
  }
  const int last = state;
  const int first = 3 - state;
  EigenLoading l = last == 1 ? start_1 : start_2;
  EigenLoading f = first == 1 ? start_1 : start_2;
  for (int round = 1; round <= opts.max_rounds; ++round) {
    // The decoded-last user's problem is opponent-free, so it moves first.
    EigenLoading l_next = best_single_response(model, last, l);
    EigenLoading f_next = best_joint_response(model, first, f, l_next);
    const double move = std::max(max_abs_diff(l_next.powers, l.powers), max_abs_diff(f_next.powers, f.powers));
    l = std::move(l_next);
    f = std::move(f_next);
    out.rounds = round;
    if (move < opts.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.user1 = last == 1 ? l : f;
  out.user2 = last == 1 ? f : l;
  return out;
}

StateLoadings maximize_joint_rate(const LargeSystemModel& model, const EigenLoading& start_1,
                                  const EigenLoading& start_2, const NeOptions& opts) {
  const auto& sc = model.scenario();
  StateLoadings out{start_1, start_2, 0, false};
  if (trivial_game(sc)) {
    out.user1 = EigenLoading::uniform(sc.n_t, sc.power_1);
    out.user2 = EigenLoading::uniform(sc.n_t, sc.power_2);
    out.converged = true;
    return out;
  }
  for (int round = 1; round <= opts.max_rounds; ++round) {
    EigenLoading n1 = best_joint_response(model, 1, out.user1, out.user2);
    EigenLoading n2 = best_joint_response(model, 2, out.user2, n1);
    const double move = std::max(max_abs_diff(n1.powers, out.user1.powers), max_abs_diff(n2.powers, out.user2.powers));
    out.user1 = std::move(n1);
    out.user2 = std::move(n2);
    out.rounds = round;
    if (move < opts.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double spa_deviation_residual(const LargeSystemModel& full, const StateLoadings& loadings, int state) {
  const LargeSystemModel model = without_restarts(full);
  const auto& sc = model.scenario();
  const UserRates base = model.state_rates(loadings.user1.powers, loadings.user2.powers, state);
  double worst = 0.0;
  constexpr double kFractions[] = {1e-3, 1e-2, 0.1, 0.5, 1.0};
  for (int user : {1, 2}) {
    const auto& own = loadings.of(user).powers;
    auto rate_with = [&](const std::vector<double>& trial) {
      const auto r = user == 1 ? model.state_rates(trial, loadings.user2.powers, state)
                               : model.state_rates(loadings.user1.powers, trial, state);
      return r.of(user);
    };
    const auto uniform = EigenLoading::uniform(sc.n_t, sc.power(user)).powers;
    worst = std::max(worst, rate_with(uniform) - base.of(user));
    for (std::size_t from = 0; from < own.size(); ++from) {
      if (own[from] <= 0.0) continue;
      for (std::size_t to = 0; to < own.size(); ++to) {
        if (to == from) continue;
        for (double frac : kFractions) {
          auto trial = own;
          const double moved = frac * own[from];
          trial[from] -= moved;
          trial[to] += moved;
          worst = std::max(worst, rate_with(trial) - base.of(user));
        }
      }
    }
  }
  return worst;
}

EigenLoading random_loading(std::size_t n_t, double power, std::uint64_t seed) {
  Philox rng(mix64(seed));
  std::vector<double> w(n_t);
  double total = 0.0;
  for (auto& v : w) {
    v = -std::log(rng.next_open_unit());
    total += v;
  }
  for (auto& v : w) v *= static_cast<double>(n_t) * power / total;
  return {w};
}

SpaNeResult solve_ne_spa(const LargeSystemModel& model, const NeOptions& opts) {
  const auto& sc = model.scenario();
  SpaNeResult out;
  const auto u1 = EigenLoading::uniform(sc.n_t, sc.power_1);
  const auto u2 = EigenLoading::uniform(sc.n_t, sc.power_2);
  out.converged = true;
  for (int s = 1; s <= kStates; ++s) {
    const StateLoadings st = solve_spa_state(model, s, u1, u2, opts);
    if (!st.converged) {
      throw SolverError("SPA water-filling iteration did not converge in state " + std::to_string(s),
                        std::numeric_limits<double>::quiet_NaN());
    }
    out.rounds = std::max(out.rounds, st.rounds);
    out.profile.at(1, s) = st.user1;
    out.profile.at(2, s) = st.user2;
    const auto r = model.state_rates(st.user1.powers, st.user2.powers, s);
    out.rates.rate[0][s - 1] = r.r1;
    out.rates.rate[1][s - 1] = r.r2;

    if (opts.verify) {
      out.residual = std::max(out.residual, spa_deviation_residual(model, st, s));
      for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        const auto a = random_loading(sc.n_t, sc.power_1, seed * 7 + static_cast<std::uint64_t>(s));
        const auto b = random_loading(sc.n_t, sc.power_2, seed * 13 + static_cast<std::uint64_t>(s));
        const StateLoadings alt = solve_spa_state(model, s, a, b, opts);
        out.restart_spread = std::max({out.restart_spread, max_abs_diff(alt.user1.powers, st.user1.powers),
                                       max_abs_diff(alt.user2.powers, st.user2.powers)});
      }
    }
  }
  out.utilities = {out.rates.utility(1, sc.p), out.rates.utility(2, sc.p)};
  return out;
}

SpaNeResult solve_ne_spa(const ChannelScenario& scenario, const NeOptions& opts) {
  return solve_ne_spa(LargeSystemModel(scenario), opts);
}

}  // namespace mimomac
