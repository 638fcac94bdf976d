#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "mimomac/errors.hpp"
#include "mimomac/games.hpp"

using namespace mimomac;

namespace {

ChannelScenario fig1(double p) { return ChannelScenario::uncorrelated(4, std::pow(10.0, 0.5), 1.0, 10.0, p); }

ChannelScenario fig3(double p) {
  ChannelScenario sc = ChannelScenario::uncorrelated(4, std::pow(10.0, 0.3), 5.0, 50.0, p);
  sc.tx_corr_1 = exp_correlation(4, 0.4);
  sc.tx_corr_2 = exp_correlation(4, 0.3);
  return sc;
}

ChannelScenario tall(double eta, double p) {
  ChannelScenario sc;
  sc.n_t = 2;
  sc.n_r = 8;
  sc.eta = eta;
  sc.power_1 = 1.0;
  sc.power_2 = 10.0;
  sc.rx_corr = HermitianMatrix::identity(8);
  sc.tx_corr_1 = HermitianMatrix::identity(2);
  sc.tx_corr_2 = HermitianMatrix::identity(2);
  sc.p = p;
  return sc;
}

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d; d = c; fd = fc; c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + r * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double wf_objective(const std::vector<double>& d, double gamma, double eta, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += std::log2(1.0 + eta * d[i] * gamma * p[i]);
  return s;
}

// Visits every point of the simplex {x >= 0, sum x = 1} on a grid of `steps` divisions.
void for_simplex(std::size_t n, int steps, const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<int> k(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      k[i] = left;
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<double>(k[j]) / steps;
      fn(x);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, steps);
}

LargeSystemModel fast_model(const ChannelScenario& sc) {
  FixedPointOptions o;
  o.verify_restarts = false;
  return LargeSystemModel(sc, o);
}

}  // namespace

TEST_CASE("TPA best response matches golden-section search") {
  const LargeSystemModel model(fig1(0.5));
  for (double opp : {0.5, 1.0, 1.5}) {
    for (int user : {1, 2}) {
      const double br = tpa_best_response(model, user, opp);
      const double ref = golden_max(
          [&](double a) {
            return model.tpa_utility(user == 1 ? TpaProfile(a, opp, 0.5) : TpaProfile(opp, a, 0.5), user);
          },
          0.0, 2.0);
      CHECK(std::abs(br - ref) < 1e-6);
    }
  }
}

TEST_CASE("TPA best response at the action-set boundary") {
  // Late in the sweep user 1 prefers to concentrate all power in its decoded-last state.
  const LargeSystemModel model(fig1(0.9));
  const double br = tpa_best_response(model, 1, 1.0);
  if (br < 1.0 / 0.9 - 1e-9) {
    CHECK(std::abs(model.tpa_utility_derivative(TpaProfile(br, 1.0, 0.9), 1)) < 1e-6);
  } else {
    CHECK(model.tpa_utility_derivative(TpaProfile(br, 1.0, 0.9), 1) >= 0.0);
  }
}

TEST_CASE("TPA degenerate coordination") {
  const TpaNeResult one = solve_ne_tpa(fig1(1.0));
  CHECK(one.profile.alpha_1() == 1.0);
  CHECK(one.profile.alpha_2() == 0.0);
  const TpaNeResult zero = solve_ne_tpa(fig1(0.0));
  CHECK(zero.profile.alpha_1() == 0.0);
  CHECK(zero.profile.alpha_2() == 1.0);
}

TEST_CASE("TPA flat utilities use the tie-break") {
  ChannelScenario sc = fig1(0.5);
  sc.eta = 1e-8;
  CHECK(tpa_best_response(sc, 1, 1.0) == 1.0);
  CHECK(tpa_best_response(sc, 2, 1.0) == 1.0);
}

TEST_CASE("TPA equilibrium quality") {
  for (double p : {0.25, 0.5, 0.75}) {
    const TpaNeResult ne = solve_ne_tpa(fig1(p));
    CHECK(ne.converged);
    CHECK(ne.residual < 1e-4);
    CHECK(ne.restart_spread < 1e-6);
    const LargeSystemModel model(fig1(p));
    CHECK(std::abs(tpa_best_response(model, 1, ne.profile.alpha_2()) - ne.profile.alpha_1()) < 1e-8);
    CHECK(std::abs(tpa_best_response(model, 2, ne.profile.alpha_1()) - ne.profile.alpha_2()) < 1e-8);
  }
}

TEST_CASE("TPA high SNR drives the equilibrium to uniform power") {
  // Needs n_r > 2 n_t for the joint high-SNR limit to exist.
  for (double p : {0.25, 0.5, 0.75}) {
    const TpaNeResult hi = solve_ne_tpa(tall(1e6, p));
    CHECK(std::abs(hi.profile.alpha_1() - 1.0) < 1e-3);
    CHECK(std::abs(hi.profile.alpha_2() - 1.0) < 1e-3);
  }
}

TEST_CASE("TPA solver failure is reported") {
  NeOptions opts;
  opts.max_rounds = 1;
  CHECK_THROWS_AS(solve_ne_tpa(fig1(0.5), opts), SolverError);
}

TEST_CASE("water-filling basics") {
  const std::vector<double> eq(4, 1.0);
  const EigenLoading u = waterfill(eq, 0.5, 2.0, 8.0);
  for (double v : u.powers) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
  const EigenLoading z = waterfill(eq, 0.5, 2.0, 0.0);
  for (double v : z.powers) CHECK(v == 0.0);
  const std::vector<double> zeros(3, 0.0);
  CHECK_THROWS_AS(waterfill(zeros, 1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(waterfill(eq, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(waterfill(eq, 1.0, -1.0, 1.0), DomainError);

  // A weak mode stays off when the budget is small; active modes share a water level.
  const std::vector<double> d = {2.0, 1.0, 0.01};
  const EigenLoading w = waterfill(d, 1.0, 1.0, 1.0);
  CHECK(w.powers[2] == 0.0);
  CHECK(w.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.powers[0] + 1.0 / 2.0 == doctest::Approx(w.powers[1] + 1.0).epsilon(1e-10));

  double last = -1.0;
  for (double b : {0.5, 1.0, 2.0, 4.0}) {
    const EigenLoading x = waterfill(d, 1.0, 1.0, b);
    CHECK(x.powers[0] >= last);
    last = x.powers[0];
  }
}

TEST_CASE("water-filling matches simplex grid search") {
  const std::vector<double> d = {1.7, 0.6};
  for (double budget : {0.3, 2.0, 10.0}) {
    const EigenLoading wf = waterfill(d, 0.8, 2.0, budget);
    double best = -1.0;
    for_simplex(2, 10000, [&](const std::vector<double>& x) {
      best = std::max(best, wf_objective(d, 0.8, 2.0, {x[0] * budget, x[1] * budget}));
    });
    const double got = wf_objective(d, 0.8, 2.0, wf.powers);
    CHECK(got >= best - 1e-9);
    CHECK(got - best < 1e-6);
  }
}

TEST_CASE("SPA with white transmit correlation is uniform") {
  const SpaNeResult ne = solve_ne_spa(ChannelScenario::uncorrelated(4, 2.0, 5.0, 50.0, 0.5));
  for (int k = 1; k <= 2; ++k)
    for (int s = 1; s <= 2; ++s)
      for (double v : ne.profile.at(k, s).powers) CHECK(v == doctest::Approx(k == 1 ? 5.0 : 50.0).epsilon(1e-9));
}

TEST_CASE("SPA loadings do not depend on p") {
  const SpaNeResult a = solve_ne_spa(fig3(0.2));
  const SpaNeResult b = solve_ne_spa(fig3(0.8));
  for (int k = 1; k <= 2; ++k)
    for (int s = 1; s <= 2; ++s)
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(a.profile.at(k, s).powers[i] - b.profile.at(k, s).powers[i]) < 1e-9);
  CHECK(a.residual < 1e-4);
  CHECK(a.restart_spread < 1e-4);
}

TEST_CASE("SPA decoded-last loading ignores the opponent") {
  const LargeSystemModel model(fig3(0.5));
  const StateLoadings a = solve_spa_state(model, 1, EigenLoading::uniform(4, 5.0), EigenLoading::uniform(4, 50.0));
  const StateLoadings b =
      solve_spa_state(model, 1, random_loading(4, 5.0, 3), random_loading(4, 50.0, 4));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(a.user1.powers[i] - b.user1.powers[i]) < 1e-9);
    CHECK(std::abs(a.user2.powers[i] - b.user2.powers[i]) < 1e-6);
  }
}

TEST_CASE("SPA equilibrium loadings beat every simplex grid point") {
  const ChannelScenario sc = fig3(0.5);
  const LargeSystemModel model = fast_model(sc);
  const SpaNeResult ne = solve_ne_spa(sc);
  const auto& l1 = ne.profile.at(1, 1).powers;
  const auto& l2 = ne.profile.at(2, 1).powers;
  const auto w1_ne = model.weights(1, l1);

  // State 1: user 1 decoded last maximises its single-user rate; user 2 maximises the joint rate
  // against user 1's loading.
  const double own1 = model.single_rate(w1_ne);
  const double own2 = model.joint_rate(w1_ne, model.weights(2, l2));
  double best1 = -1.0, best2 = -1.0;
  for_simplex(4, 100, [&](const std::vector<double>& x) {
    std::vector<double> q1(4), q2(4);
    for (int i = 0; i < 4; ++i) {
      q1[i] = 20.0 * x[i];
      q2[i] = 200.0 * x[i];
    }
    best1 = std::max(best1, model.single_rate(model.weights(1, q1)));
    best2 = std::max(best2, model.joint_rate(w1_ne, model.weights(2, q2)));
  });
  CHECK(own1 >= best1 - 1e-9);
  CHECK(own2 >= best2 - 1e-9);
  CHECK(own1 - best1 < 1e-2);
  CHECK(own2 - best2 < 1e-2);
}

TEST_CASE("joint maximisation with white correlation") {
  const LargeSystemModel model(ChannelScenario::uncorrelated(4, 2.0, 5.0, 50.0, 0.5));
  const StateLoadings s = maximize_joint_rate(model, random_loading(4, 5.0, 1), random_loading(4, 50.0, 2));
  for (double v : s.user1.powers) CHECK(v == doctest::Approx(5.0).epsilon(1e-6));
  for (double v : s.user2.powers) CHECK(v == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("random loadings are feasible and seeded") {
  const EigenLoading a = random_loading(4, 5.0, 9);
  const EigenLoading b = random_loading(4, 5.0, 9);
  CHECK(a.powers == b.powers);
  CHECK(a.total() == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_NOTHROW(a.check_feasible(4, 5.0, 1, 1));
}
