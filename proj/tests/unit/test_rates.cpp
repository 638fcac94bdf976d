#include <cmath>
#include <functional>

#include "doctest.h"
#include "mimomac/errors.hpp"
#include "mimomac/montecarlo.hpp"
#include "mimomac/rates.hpp"

using namespace mimomac;

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 1e-13, 50);
}

// E_1(x) = int_1^inf e^{-xt}/t dt = int_0^1 e^{-x/u}/u du.
double expint_e1(double x) {
  return integrate([x](double u) { return u <= 0.0 ? 0.0 : std::exp(-x / u) / u; }, 0.0, 1.0);
}

bool within(const Estimate& e, double ref, double sigmas) { return std::abs(e.mean - ref) <= sigmas * e.std_error; }

}  // namespace

TEST_CASE("quadrature oracle sanity") {
  // E_1(1) = 0.219383934395520...
  CHECK(expint_e1(1.0) == doctest::Approx(0.21938393439552).epsilon(1e-10));
}

TEST_CASE("scalar Rayleigh ergodic rate matches exponential-integral form") {
  const double rho = 10.0;
  const ChannelScenario sc = ChannelScenario::uncorrelated(1, rho, 1.0, 1.0, 0.5);
  const McConfig mc{20000, 5, 0};
  const Estimate e = ergodic_logdet(sc, HermitianMatrix::identity(1), std::nullopt, mc);
  const double ref = std::exp(1.0 / rho) * expint_e1(1.0 / rho) / std::log(2.0);
  CHECK(within(e, ref, 3.0));
  CHECK(e.std_error < 0.02);
}

TEST_CASE("zero SNR and zero precoders give zero rate") {
  ChannelScenario sc = ChannelScenario::uncorrelated(4, 0.0, 1.0, 1.0, 0.5);
  const McConfig mc{50, 1, 1};
  const Estimate e = ergodic_logdet(sc, HermitianMatrix::identity(4), HermitianMatrix::identity(4), mc);
  CHECK(e.mean == 0.0);
  sc.eta = 3.0;
  CHECK(ergodic_logdet(sc, HermitianMatrix::zero(4), std::nullopt, mc).mean == 0.0);
}

TEST_CASE("SIC identities") {
  const ChannelScenario sc = ChannelScenario::uncorrelated(4, 3.0, 1.0, 10.0, 0.5);
  const McConfig mc{2000, 9, 0};
  const HermitianMatrix q1 = HermitianMatrix::identity(4);
  const HermitianMatrix q2{10.0 * CMatrix::identity(4)};
  const RatePair s1 = sic_rate_pair(sc, 1, q1, q2, mc);
  const RatePair s2 = sic_rate_pair(sc, 2, q1, q2, mc);
  const Estimate joint = ergodic_logdet(sc, q1, q2, mc);
  CHECK(s1.sum.mean == doctest::Approx(joint.mean).epsilon(1e-12));
  CHECK(s2.sum.mean == doctest::Approx(joint.mean).epsilon(1e-12));
  CHECK(s1.r1.mean + s1.r2.mean == doctest::Approx(joint.mean).epsilon(1e-12));
  // Decoded last sees no interference.
  CHECK(s1.r1.mean == doctest::Approx(ergodic_logdet(sc, q1, std::nullopt, mc).mean).epsilon(1e-12));
  CHECK(s2.r2.mean == doctest::Approx(ergodic_logdet(sc, std::nullopt, q2, mc).mean).epsilon(1e-12));
  CHECK(s1.r1.mean > s2.r1.mean);
  CHECK(s2.r2.mean > s1.r2.mean);

  // A silent user leaves the other with its single-user rate in either order.
  const RatePair quiet = sic_rate_pair(sc, 1, q1, HermitianMatrix::zero(4), mc);
  CHECK(quiet.r2.mean == doctest::Approx(0.0));
  CHECK(quiet.r1.mean == doctest::Approx(s1.r1.mean).epsilon(1e-12));

  const RatePair sud = sud_rate_pair(sc, q1, q2, mc);
  CHECK(sud.r1.mean <= s2.r1.mean + 1e-12);
  CHECK(sud.r2.mean <= s1.r2.mean + 1e-12);
  CHECK(sud.sum.mean < joint.mean);
}

TEST_CASE("utility is the state average of SIC rates") {
  ChannelScenario sc = ChannelScenario::uncorrelated(4, 3.0, 1.0, 10.0, 0.3);
  const McConfig mc{1000, 4, 0};
  const TpaProfile prof(1.5, 0.8, 0.3);
  const StatePrecoders q = tpa_precoders(sc, prof);
  const RatePair s1 = sic_rate_pair(sc, 1, q[0][0], q[0][1], mc);
  const RatePair s2 = sic_rate_pair(sc, 2, q[1][0], q[1][1], mc);
  const RatePair u = utilities(sc, q, mc);
  CHECK(u.r1.mean == doctest::Approx(0.3 * s1.r1.mean + 0.7 * s2.r1.mean).epsilon(1e-12));
  CHECK(u.r2.mean == doctest::Approx(0.3 * s1.r2.mean + 0.7 * s2.r2.mean).epsilon(1e-12));
  CHECK(utility(sc, prof, 1, mc).mean == doctest::Approx(u.r1.mean).epsilon(1e-12));

  // Off-state fractions saturate the temporal budget.
  CHECK(0.3 * prof.fraction(1, 1) + 0.7 * prof.fraction(1, 2) == doctest::Approx(1.0));
  CHECK(0.3 * prof.fraction(2, 1) + 0.7 * prof.fraction(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("degenerate coordination") {
  // p = 1: user 1 always decoded last at full power, user 2 always decoded first.
  ChannelScenario sc = ChannelScenario::uncorrelated(4, 3.0, 1.0, 10.0, 1.0);
  const McConfig mc{1000, 2, 0};
  const TpaProfile prof(1.0, 0.0, 1.0);
  const HermitianMatrix q1 = HermitianMatrix::identity(4);
  const HermitianMatrix q2{10.0 * CMatrix::identity(4)};
  const RatePair s1 = sic_rate_pair(sc, 1, q1, q2, mc);
  CHECK(utility(sc, prof, 1, mc).mean == doctest::Approx(s1.r1.mean).epsilon(1e-12));
  CHECK(utility(sc, prof, 2, mc).mean == doctest::Approx(s1.r2.mean).epsilon(1e-12));
}

TEST_CASE("infeasible profiles are rejected") {
  CHECK_THROWS_AS(TpaProfile(2.5, 1.0, 0.5), ConstraintError);
  CHECK_THROWS_AS(TpaProfile(-0.1, 1.0, 0.5), ConstraintError);
  CHECK_THROWS_WITH_AS(TpaProfile(1.0, 2.1, 0.5), doctest::Contains("temporal"), ConstraintError);
  const ChannelScenario sc = ChannelScenario::uncorrelated(4, 3.0, 1.0, 1.0, 0.5);
  SpaProfile prof;
  for (int k = 1; k <= 2; ++k)
    for (int s = 1; s <= 2; ++s) prof.at(k, s) = EigenLoading::uniform(4, 1.0);
  CHECK_NOTHROW(check_feasible(sc, prof));
  prof.at(2, 1).powers = {2.0, 2.0, 1.0, 0.0};
  CHECK_THROWS_WITH_AS(check_feasible(sc, prof), doctest::Contains("spatial"), ConstraintError);
  prof.at(2, 1).powers = {-0.5, 2.0, 2.0, 0.5};
  CHECK_THROWS_AS(check_feasible(sc, prof), ConstraintError);
}

TEST_CASE("rates grow with SNR") {
  const McConfig mc{500, 1, 0};
  double last = 0.0;
  for (double eta : {0.1, 1.0, 10.0, 100.0}) {
    const ChannelScenario sc = ChannelScenario::uncorrelated(4, eta, 1.0, 1.0, 0.5);
    const double r = ergodic_logdet(sc, HermitianMatrix::identity(4), HermitianMatrix::identity(4), mc).mean;
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("Monte Carlo determinism and error scaling") {
  const ChannelScenario sc = ChannelScenario::uncorrelated(4, 3.0, 1.0, 10.0, 0.5);
  const HermitianMatrix q = HermitianMatrix::identity(4);
  const Estimate a = ergodic_logdet(sc, q, q, {4000, 3, 1});
  const Estimate b = ergodic_logdet(sc, q, q, {4000, 3, 5});
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const Estimate small = ergodic_logdet(sc, q, q, {1000, 3, 0});
  CHECK(small.std_error / a.std_error == doctest::Approx(2.0).epsilon(0.15));
  CHECK_THROWS_AS((McConfig{0, 1, 0}.validate()), DomainError);
}

TEST_CASE("common random numbers shrink difference errors") {
  const ChannelScenario sc = ChannelScenario::uncorrelated(4, 3.0, 1.0, 1.0, 0.5);
  McSamples s = sample_trials(sc, {2000, 8, 0}, 2, [](const ChannelDraw& d, std::span<double> out) {
    out[0] = log2det_identity_plus(3.0 * gram(d.h1));
    out[1] = log2det_identity_plus(3.1 * gram(d.h1));
  });
  const double w[2] = {-1.0, 1.0};
  const Estimate diff = s.combine(w);
  CHECK(diff.mean > 0.0);
  CHECK(diff.std_error < 0.05 * s.estimate(0).std_error);
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1001, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.1).epsilon(1e-14));
  CHECK(pairwise_sum({}) == 0.0);
}
