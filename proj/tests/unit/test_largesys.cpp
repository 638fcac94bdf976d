#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mimomac/errors.hpp"
#include "mimomac/largesys.hpp"
#include "mimomac/rates.hpp"

using namespace mimomac;

namespace {

ChannelScenario fig1(double p = 0.5) {
  return ChannelScenario::uncorrelated(4, std::pow(10.0, 0.5), 1.0, 10.0, p);
}

ChannelScenario fig3(double p = 0.5) {
  ChannelScenario sc = ChannelScenario::uncorrelated(4, std::pow(10.0, 0.3), 5.0, 50.0, p);
  sc.tx_corr_1 = exp_correlation(4, 0.4);
  sc.tx_corr_2 = exp_correlation(4, 0.3);
  return sc;
}

// Independent oracle: bisection on gamma of gamma - g(d(gamma)), written from the defining equations.
std::pair<double, double> oracle_fixed_point(const std::vector<double>& w, const std::vector<double>& d_r, double eta,
                                             double norm, double c) {
  auto delta_of = [&](double g) {
    double s = 0.0;
    for (double v : w) s += v / (1.0 + c * eta * v * g);
    return s / norm;
  };
  auto gamma_of = [&](double d) {
    double s = 0.0;
    for (double v : d_r) s += v / (1.0 + c * eta * v * d);
    return s / norm;
  };
  double lo = 0.0, hi = gamma_of(0.0);
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_of(delta_of(mid)) > mid) lo = mid;
    else hi = mid;
  }
  const double g = 0.5 * (lo + hi);
  return {g, delta_of(g)};
}

}  // namespace

TEST_CASE("zero SNR fixed point") {
  const std::vector<double> w = {2.0, 1.0, 0.5, 0.5};
  const std::vector<double> d = {1.5, 1.0, 1.0, 0.5};
  const FixedPoint fp = solve_fp_single(w, d, 0.0, 4);
  CHECK(fp.gamma == doctest::Approx(1.0));
  CHECK(fp.delta == doctest::Approx(1.0));
  CHECK(equivalent_rate(w, d, 0.0, 4, 1, fp) == 0.0);
}

TEST_CASE("silent transmitter") {
  const std::vector<double> w(4, 0.0);
  const std::vector<double> d(4, 1.0);
  const FixedPoint fp = solve_fp_single(w, d, 5.0, 4);
  CHECK(fp.delta == 0.0);
  CHECK(fp.gamma == doctest::Approx(1.0));
  CHECK(equivalent_rate(w, d, 5.0, 4, 1, fp) == doctest::Approx(0.0));
}

TEST_CASE("isotropic fixed point solves a quadratic") {
  const std::vector<double> ones(4, 1.0);
  for (double eta : {0.1, 1.0, 10.0, 1000.0}) {
    const FixedPoint fp = solve_fp_single(ones, ones, eta, 4);
    const double ref = (-1.0 + std::sqrt(1.0 + 4.0 * eta)) / (2.0 * eta);
    CHECK(fp.gamma == doctest::Approx(ref).epsilon(1e-9));
    CHECK(fp.delta == doctest::Approx(ref).epsilon(1e-9));
    CHECK(fp.residual < 1e-10);
  }
}

TEST_CASE("joint fixed point matches bisection oracle") {
  const ChannelScenario sc = fig3();
  const LargeSystemModel model(sc);
  const std::vector<double> p1 = {8.0, 6.0, 4.0, 2.0};
  const std::vector<double> p2 = {50.0};
  const auto w1 = model.weights(1, p1);
  const auto w2 = model.weights(2, p2);
  const FixedPoint fp = model.joint_fixed_point(w1, w2);
  std::vector<double> w = w1;
  w.insert(w.end(), w2.begin(), w2.end());
  const auto [g, d] = oracle_fixed_point(w, model.spectra().rx, sc.eta, 8.0, 2.0);
  CHECK(std::abs(fp.gamma - g) < 1e-6);
  CHECK(std::abs(fp.delta - d) < 1e-6);
  CHECK(fp.residual < 1e-10);

  const FixedPoint single = model.single_fixed_point(w1);
  const auto [gs, ds] = oracle_fixed_point(w1, model.spectra().rx, sc.eta, 4.0, 1.0);
  CHECK(std::abs(single.gamma - gs) < 1e-6);
  CHECK(std::abs(single.delta - ds) < 1e-6);
}

TEST_CASE("solver input validation") {
  const std::vector<double> bad = {1.0, -1.0};
  const std::vector<double> d = {1.0, 1.0};
  CHECK_THROWS_AS(solve_fp_single(bad, d, 1.0, 2), DomainError);
  CHECK_THROWS_AS(solve_fp_single(d, d, -1.0, 2), DomainError);
}

TEST_CASE("high-SNR limit of the fixed point") {
  const std::vector<double> ones8(8, 1.0);
  CHECK(high_snr_gamma(ones8, 2, 1) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(high_snr_gamma(ones8, 2, 2) == doctest::Approx(1.0).epsilon(1e-10));
  const std::vector<double> ones4(4, 1.0);
  CHECK_THROWS_AS(high_snr_gamma(ones4, 4, 1), DomainError);
  CHECK_THROWS_AS(high_snr_gamma(ones4, 4, 2), DomainError);

  // eta * gamma tends to the root for n_r > n_t.
  const double eta = 1e6;
  const std::vector<double> w2(2, 1.0);
  const FixedPoint tall = solve_fixed_point(w2, ones8, eta, 2.0, 1.0);
  CHECK(eta * tall.delta == doctest::Approx(1.0 / high_snr_gamma(ones8, 2, 1)).epsilon(1e-3));
}

TEST_CASE("low-SNR closed form") {
  ChannelScenario sc = fig3();
  sc.eta = 1e-5;
  const UserRates low = low_snr_rates(sc, 1.0, 1.0);
  CHECK(low.r1 == doctest::Approx(4.0 * sc.eta * 5.0 * std::numbers::log2e).epsilon(1e-12));
  CHECK(low.r2 == doctest::Approx(4.0 * sc.eta * 50.0 * std::numbers::log2e).epsilon(1e-12));
  const LargeSystemModel model(sc);
  for (double a1 : {0.0, 1.0, 2.0}) {
    const TpaProfile prof(a1, 1.0, 0.5);
    CHECK(model.tpa_utility(prof, 1) == doctest::Approx(low.r1).epsilon(1e-3));
    CHECK(model.tpa_utility(prof, 2) == doctest::Approx(low.r2).epsilon(1e-3));
  }
}

TEST_CASE("approximated TPA rates") {
  const ChannelScenario sc = fig1();
  const ApproxRates r = approx_rates_tpa(sc, 0.0, 1.0);
  CHECK(r.at(1, 1) == 0.0);
  CHECK(r.at(1, 2) > 0.0);
  const ApproxRates full = approx_rates_tpa(sc, 1.0, 1.0);
  // Symmetric power split: both states have the same joint rate.
  CHECK(full.state_sum(1) == doctest::Approx(full.state_sum(2)).epsilon(1e-10));
  // Uniform spatial loading on uncorrelated antennas is the temporal profile (1, 1).
  const UserRates s = approx_rates_spa(sc, EigenLoading::uniform(4, 1.0), EigenLoading::uniform(4, 10.0), 1);
  CHECK(s.r1 == doctest::Approx(full.at(1, 1)).epsilon(1e-10));
  CHECK(s.r2 == doctest::Approx(full.at(2, 1)).epsilon(1e-10));
}

TEST_CASE("utility derivative agrees with finite differences") {
  for (double p : {0.25, 0.5, 0.75}) {
    const LargeSystemModel model(fig1(p));
    for (double a : {0.3, 1.0, 1.2}) {
      const double h = 1e-5;
      const TpaProfile mid(a, 1.0, p);
      const double fd =
          (model.tpa_utility(TpaProfile(a + h, 1.0, p), 1) - model.tpa_utility(TpaProfile(a - h, 1.0, p), 1)) / (2 * h);
      CHECK(model.tpa_utility_derivative(mid, 1) == doctest::Approx(fd).epsilon(1e-5));
      const double fd2 =
          (model.tpa_utility(TpaProfile(1.0, a + h, p), 2) - model.tpa_utility(TpaProfile(1.0, a - h, p), 2)) / (2 * h);
      CHECK(model.tpa_utility_derivative(TpaProfile(1.0, a, p), 2) == doctest::Approx(fd2).epsilon(1e-5));
    }
  }
}

TEST_CASE("own-variable concavity of approximated utilities") {
  const LargeSystemModel model(fig1(0.5));
  const double h = 0.01;
  for (double a = h; a + h <= 2.0; a += 0.1) {
    const double d2 = model.tpa_utility(TpaProfile(a + h, 1.0, 0.5), 1) - 2 * model.tpa_utility(TpaProfile(a, 1.0, 0.5), 1) +
                      model.tpa_utility(TpaProfile(a - h, 1.0, 0.5), 1);
    CHECK(d2 < 0.0);
  }
}

TEST_CASE("approximation tracks Monte Carlo") {
  const ChannelScenario sc = fig1(0.5);
  const McConfig mc{20000, 17, 0};
  const TpaProfile prof(1.0, 1.0, 0.5);
  const ApproxRates ap = approx_rates_tpa(sc, 1.0, 1.0);
  const StatePrecoders q = tpa_precoders(sc, prof);
  for (int s = 1; s <= 2; ++s) {
    const RatePair mcr = sic_rate_pair(sc, s, q[s - 1][0], q[s - 1][1], mc);
    CHECK(std::abs(ap.at(1, s) - mcr.r1.mean) < 0.05 * mcr.r1.mean);
    CHECK(std::abs(ap.at(2, s) - mcr.r2.mean) < 0.05 * mcr.r2.mean);
  }
}
