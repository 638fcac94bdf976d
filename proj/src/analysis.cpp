// SPDX-License-Identifier: Apache-2.0
#include "mimomac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mimomac/errors.hpp"
#include "mimomac/random.hpp"

namespace mimomac {

namespace {

ChannelScenario at_p(const ChannelScenario& scenario, double p) {
  ChannelScenario s = scenario;
  s.p = p;
  return s;
}

// log2 det(I + c1 G1 + c2 G2) with G_k = H_k H_k^H.
double gram_logdet(const CMatrix& g1, const CMatrix& g2, double c1, double c2) {
  if (c1 == 0.0 && c2 == 0.0) return 0.0;
  if (c2 == 0.0) return log2det_identity_plus(c1 * g1);
  if (c1 == 0.0) return log2det_identity_plus(c2 * g2);
  return log2det_identity_plus(c1 * g1 + c2 * g2);
}

HermitianMatrix loading_covariance(const ChannelScenario& scenario, int user, const EigenLoading& loading) {
  SpaProfile profile;
  for (int s = 1; s <= kStates; ++s) {
    profile.at(user, s) = loading;
    profile.at(3 - user, s) = EigenLoading::uniform(scenario.n_t, scenario.power(3 - user));
  }
  return spa_precoders(scenario, profile)[0][user - 1];
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

McConfig offset_seed(const McConfig& mc, std::uint64_t offset) {
  McConfig out = mc;
  out.master_seed = mix64(mc.master_seed + offset);
  return out;
}

}  // namespace

Estimate centralized_sumrate_tpa(const ChannelScenario& scenario, const McConfig& mc) {
  const auto q1 = HermitianMatrix::diagonal(std::vector<double>(scenario.n_t, scenario.power_1));
  const auto q2 = HermitianMatrix::diagonal(std::vector<double>(scenario.n_t, scenario.power_2));
  return ergodic_logdet(scenario, q1, q2, mc);
}

CentralizedSpa centralized_sumrate_spa(const ChannelScenario& scenario, const McConfig& mc, const NeOptions& opts) {
  const LargeSystemModel model(scenario);
  const std::size_t n = scenario.n_t;
  const EigenLoading starts[3][2] = {
      {EigenLoading::uniform(n, scenario.power_1), EigenLoading::uniform(n, scenario.power_2)},
      {random_loading(n, scenario.power_1, 11), random_loading(n, scenario.power_2, 12)},
      {random_loading(n, scenario.power_1, 21), random_loading(n, scenario.power_2, 22)},
  };
  CentralizedSpa out;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<StateLoadings> found;
  for (const auto& st : starts) {
    StateLoadings l = maximize_joint_rate(model, st[0], st[1], opts);
    if (!l.converged) {
      throw SolverError("joint water-filling did not converge in " + std::to_string(opts.max_rounds) + " rounds",
                        std::numeric_limits<double>::quiet_NaN());
    }
    const double value = model.joint_rate(model.weights(1, l.user1.powers), model.weights(2, l.user2.powers));
    if (value > best) {
      best = value;
      out.loadings = l;
    }
    found.push_back(std::move(l));
  }
  for (const auto& l : found) {
    out.start_spread = std::max({out.start_spread, max_abs_diff(l.user1.powers, out.loadings.user1.powers),
                                 max_abs_diff(l.user2.powers, out.loadings.user2.powers)});
  }
  out.approx_sumrate = best;
  out.sumrate = ergodic_logdet(scenario, loading_covariance(scenario, 1, out.loadings.user1),
                               loading_covariance(scenario, 2, out.loadings.user2), mc);
  return out;
}

void check_p_grid(std::span<const double> p_grid) {
  if (p_grid.empty()) throw DomainError("p grid is empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] >= 0.0 && p_grid[i] <= 1.0)) throw DomainError("p grid value outside [0, 1]");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) throw DomainError("p grid must be strictly increasing");
  }
}

double SweepResult::relative_spread() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& e : ne_sumrate) {
    lo = std::min(lo, e.mean);
    hi = std::max(hi, e.mean);
  }
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

SweepResult tpa_sumrate_sweep(const ChannelScenario& scenario, std::span<const double> p_grid, const McConfig& mc,
                              const NeOptions& opts) {
  check_p_grid(p_grid);
  SweepResult out;
  out.p.assign(p_grid.begin(), p_grid.end());
  for (double p : p_grid) {
    try {
      out.profiles.push_back(solve_ne_tpa(at_p(scenario, p), opts).profile);
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "p = " << p << ": " << e.what();
      throw SolverError(msg.str(), e.last_residual());
    }
  }

  // Columns per grid point: J^(1), S_1^(1), J^(2), S_2^(2); last column: centralized.
  const std::size_t m = out.p.size();
  const double rho1 = scenario.eta * scenario.power_1;
  const double rho2 = scenario.eta * scenario.power_2;
  const auto samples = sample_trials(scenario, mc, 4 * m + 1, [&](const ChannelDraw& d, std::span<double> row) {
    const CMatrix g1 = gram(d.h1);
    const CMatrix g2 = gram(d.h2);
    for (std::size_t i = 0; i < m; ++i) {
      const TpaProfile& pr = out.profiles[i];
      const double a11 = rho1 * pr.fraction(1, 1);
      const double a21 = rho2 * pr.fraction(2, 1);
      const double a12 = rho1 * pr.fraction(1, 2);
      const double a22 = rho2 * pr.fraction(2, 2);
      row[4 * i + 0] = gram_logdet(g1, g2, a11, a21);
      row[4 * i + 1] = gram_logdet(g1, g2, a11, 0.0);
      row[4 * i + 2] = gram_logdet(g1, g2, a12, a22);
      row[4 * i + 3] = gram_logdet(g1, g2, 0.0, a22);
    }
    row[4 * m] = gram_logdet(g1, g2, rho1, rho2);
  });

  std::vector<std::vector<double>> sum_weights(m, std::vector<double>(4 * m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const double p = out.p[i];
    auto& ws = sum_weights[i];
    ws[4 * i + 0] = p;
    ws[4 * i + 2] = 1.0 - p;
    std::vector<double> w1(4 * m + 1, 0.0);
    w1[4 * i + 1] = p;
    w1[4 * i + 2] = 1.0 - p;
    w1[4 * i + 3] = -(1.0 - p);
    std::vector<double> w2(4 * m + 1, 0.0);
    for (std::size_t j = 0; j < w2.size(); ++j) w2[j] = ws[j] - w1[j];
    std::vector<double> wg(4 * m + 1, 0.0);
    for (std::size_t j = 0; j < wg.size(); ++j) wg[j] = -ws[j];
    wg[4 * m] += 1.0;
    out.ne_sumrate.push_back(samples.combine(ws));
    out.user1.push_back(samples.combine(w1));
    out.user2.push_back(samples.combine(w2));
    out.gap.push_back(samples.combine(wg));
  }
  out.centralized = samples.estimate(4 * m);

  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double h1 = out.p[i] - out.p[i - 1];
    const double h2 = out.p[i + 1] - out.p[i];
    std::vector<double> w(4 * m + 1, 0.0);
    const double c_prev = 2.0 / (h1 * (h1 + h2));
    const double c_mid = -2.0 / (h1 * h2);
    const double c_next = 2.0 / (h2 * (h1 + h2));
    for (std::size_t j = 0; j < w.size(); ++j)
      w[j] = c_prev * sum_weights[i - 1][j] + c_mid * sum_weights[i][j] + c_next * sum_weights[i + 1][j];
    out.second_differences.push_back(samples.combine(w));
  }
  return out;
}

DecoderComparison compare_decoders(const ChannelScenario& scenario, const McConfig& mc, const NeOptions& opts) {
  DecoderComparison out;
  out.fair_profile = solve_ne_tpa(at_p(scenario, 0.5), opts).profile;
  const TpaProfile unfair = solve_ne_tpa(at_p(scenario, 0.0), opts).profile;
  const double rho1 = scenario.eta * scenario.power_1;
  const double rho2 = scenario.eta * scenario.power_2;
  const TpaProfile& f = out.fair_profile;
  // Columns: fair J^(1), fair J^(2), unfair J^(2), full-power joint, full-power singles.
  const auto s = sample_trials(scenario, mc, 6, [&](const ChannelDraw& d, std::span<double> row) {
    const CMatrix g1 = gram(d.h1);
    const CMatrix g2 = gram(d.h2);
    row[0] = gram_logdet(g1, g2, rho1 * f.fraction(1, 1), rho2 * f.fraction(2, 1));
    row[1] = gram_logdet(g1, g2, rho1 * f.fraction(1, 2), rho2 * f.fraction(2, 2));
    row[2] = gram_logdet(g1, g2, rho1 * unfair.fraction(1, 2), rho2 * unfair.fraction(2, 2));
    row[3] = gram_logdet(g1, g2, rho1, rho2);
    row[4] = gram_logdet(g1, g2, rho1, 0.0);
    row[5] = gram_logdet(g1, g2, 0.0, rho2);
  });
  const double w_fair[6] = {0.5, 0.5, 0, 0, 0, 0};
  const double w_unfair[6] = {0, 0, 1, 0, 0, 0};
  const double w_sud[6] = {0, 0, 0, 2, -1, -1};
  const double w_diff[6] = {0.5, 0.5, 0, -2, 1, 1};
  out.sic_fair = s.combine(w_fair);
  out.sic_unfair = s.combine(w_unfair);
  out.sud = s.combine(w_sud);
  out.fair_minus_sud = s.combine(w_diff);
  return out;
}

LineCoefficients spa_line_coeffs(const ChannelScenario& scenario, const McConfig& mc, const NeOptions& opts) {
  const SpaNeResult ne = solve_ne_spa(scenario, opts);
  const auto samples = sample_state_logdets(scenario, spa_precoders(scenario, ne.profile), mc);
  std::array<double, columns::kCount> wa{};
  wa[columns::kJoint[0]] = 1.0;
  wa[columns::kJoint[1]] = -1.0;
  std::array<double, columns::kCount> wb{};
  wb[columns::kJoint[1]] = 1.0;
  return {samples.combine(wa), samples.combine(wb)};
}

double stackelberg_p(const LineCoefficients& coeffs) { return coeffs.a.mean > 0.0 ? 1.0 : 0.0; }

SpaLineSweep spa_line_sweep(const ChannelScenario& scenario, std::span<const double> p_grid, const McConfig& mc,
                            const NeOptions& opts) {
  check_p_grid(p_grid);
  SpaLineSweep out;
  const SpaNeResult ne = solve_ne_spa(scenario, opts);
  const auto line = sample_state_logdets(scenario, spa_precoders(scenario, ne.profile), mc);
  std::array<double, columns::kCount> wa{};
  wa[columns::kJoint[0]] = 1.0;
  wa[columns::kJoint[1]] = -1.0;
  std::array<double, columns::kCount> wb{};
  wb[columns::kJoint[1]] = 1.0;
  out.coeffs = {line.combine(wa), line.combine(wb)};
  out.p.assign(p_grid.begin(), p_grid.end());

  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const double p = p_grid[i];
    const ChannelScenario sc = at_p(scenario, p);
    const SpaNeResult point = solve_ne_spa(sc, opts);
    // Each point on its own draws so that the residual is not an identity of shared samples.
    const auto s = sample_state_logdets(sc, spa_precoders(sc, point.profile), offset_seed(mc, i + 1));
    std::array<double, columns::kCount> w{};
    w[columns::kJoint[0]] = p;
    w[columns::kJoint[1]] = 1.0 - p;
    const Estimate measured = s.combine(w);
    const Estimate fitted = line.combine(w);
    out.sumrate.push_back(measured);
    out.residual.push_back({measured.mean - fitted.mean, std::hypot(measured.std_error, fitted.std_error)});
  }
  out.centralized = centralized_sumrate_spa(scenario, mc, opts).sumrate;
  return out;
}

RateRegion rate_region(const ChannelScenario& scenario, std::span<const double> p_grid, const McConfig& mc,
                       const NeOptions& opts) {
  check_p_grid(p_grid);
  RateRegion out;
  for (double p : p_grid) {
    const ChannelScenario sc = at_p(scenario, p);
    const SpaNeResult ne = solve_ne_spa(sc, opts);
    const RatePair u = utilities(sc, spa_precoders(sc, ne.profile), mc);
    out.sic.push_back({p, u.r1, u.r2});
  }
  const CentralizedSpa central = centralized_sumrate_spa(scenario, mc, opts);
  out.centralized = central.sumrate;
  const RatePair sud = sud_rate_pair(scenario, loading_covariance(scenario, 1, central.loadings.user1),
                                     loading_covariance(scenario, 2, central.loadings.user2), mc);
  out.sud = {std::numeric_limits<double>::quiet_NaN(), sud.r1, sud.r2};

  if (out.sic.size() >= 3) {
    const auto& a = out.sic.front();
    const auto& b = out.sic.back();
    const double dx = b.rate_1.mean - a.rate_1.mean;
    const double dy = b.rate_2.mean - a.rate_2.mean;
    const double len = std::hypot(dx, dy);
    if (len > 0.0) {
      for (const auto& pt : out.sic) {
        const double cross = dx * (pt.rate_2.mean - a.rate_2.mean) - dy * (pt.rate_1.mean - a.rate_1.mean);
        out.chord_deviation = std::max(out.chord_deviation, std::abs(cross) / len);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Property checks

namespace {

struct CheckAccumulator {
  CheckResult result;
  bool first = true;

  explicit CheckAccumulator(std::string name) { result.name = std::move(name); }

  void add(double value, double slack, const std::string& context) {
    ++result.instances;
    if (first || value < result.worst_margin) result.worst_margin = value;
    first = false;
    if (value < -slack) {
      ++result.violations;
      result.passed = false;
      if (result.counterexample.empty()) result.counterexample = context;
    }
  }
};

double re_trace(const CMatrix& m) { return m.trace().real(); }

CMatrix random_gaussian(Philox& rng, std::size_t rows, std::size_t cols) {
  CMatrix m(rows, cols);
  for (auto& v : m.data()) v = rng.next_complex_gaussian(1.0);
  return m;
}

double uniform(Philox& rng, double lo, double hi) { return lo + (hi - lo) * (1.0 - rng.next_open_unit()); }

std::string describe(std::initializer_list<std::pair<const char*, double>> values) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, v] : values) {
    os << (first ? "" : ", ") << k << " = " << v;
    first = false;
  }
  return os.str();
}

}  // namespace

double lemma_trace(const CMatrix& a1, const CMatrix& a2, const CMatrix& b1, const CMatrix& b2) {
  const CMatrix eye = CMatrix::identity(a1.rows());
  const CMatrix m = (a2 - a1) * (inverse(eye + a1) - inverse(eye + a2));
  const CMatrix n = (b2 - b1) * (inverse(eye + b1 + a1) - inverse(eye + b2 + a2));
  return re_trace(m) + re_trace(n);
}

double inverse_difference_trace(const CMatrix& x, const CMatrix& y) {
  return re_trace((x - y) * (inverse(y) - inverse(x)));
}

DscMargin dsc_margin(const CMatrix& g1, const CMatrix& g2, double rho1, double rho2, double p,
                     const double (&a1)[2], const double (&a2)[2]) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("dsc_margin: p must lie in (0, 1)");
  const double q = 1.0 - p;
  const CMatrix eye = CMatrix::identity(g1.rows());
  DscMargin out;
  // State 1: user 1 decoded last, user 2's state-1 fraction (1 - q alpha_2) / p.
  out.state_1 = lemma_trace(rho1 * a1[0] * g1, rho1 * a1[1] * g1, (rho2 * (1.0 - q * a2[0]) / p) * g2,
                            (rho2 * (1.0 - q * a2[1]) / p) * g2);
  // State 2 mirrors state 1 with the users' roles swapped.
  out.state_2 = lemma_trace(rho2 * a2[0] * g2, rho2 * a2[1] * g2, (rho1 * (1.0 - p * a1[0]) / q) * g1,
                            (rho1 * (1.0 - p * a1[1]) / q) * g1);
  out.combined = p * out.state_1 + q * out.state_2;

  auto du1 = [&](double x1, double x2) {
    const double f12 = (1.0 - p * x1) / q;
    return p * re_trace(inverse(eye + rho1 * x1 * g1) * (rho1 * g1)) +
           q * re_trace(inverse(eye + rho1 * f12 * g1 + rho2 * x2 * g2) * ((-p / q) * rho1 * g1));
  };
  auto du2 = [&](double x1, double x2) {
    const double f21 = (1.0 - q * x2) / p;
    return q * re_trace(inverse(eye + rho2 * x2 * g2) * (rho2 * g2)) +
           p * re_trace(inverse(eye + rho1 * x1 * g1 + rho2 * f21 * g2) * ((-q / p) * rho2 * g2));
  };
  out.derivative = (a1[1] - a1[0]) * (du1(a1[0], a2[0]) - du1(a1[1], a2[1])) +
                   (a2[1] - a2[0]) * (du2(a1[0], a2[0]) - du2(a1[1], a2[1]));
  return out;
}

CheckResult verify_dsc(const ChannelScenario& scenario, std::size_t trials, std::uint64_t seed) {
  scenario.validate();
  CheckAccumulator acc("dsc");
  CheckAccumulator identity("dsc-derivative-form");
  const ChannelSampler sampler(scenario);
  const double rho1 = scenario.eta * scenario.power_1;
  const double rho2 = scenario.eta * scenario.power_2;

  for (std::size_t t = 0; t < trials; ++t) {
    const ChannelDraw d = sampler.draw(trial_seed(seed, t));
    Philox rng(trial_seed(mix64(seed) + 1, t));
    const double p = uniform(rng, 0.01, 0.99);
    const double q = 1.0 - p;
    double a1[2];
    double a2[2];
    do {
      for (double& v : a1) v = uniform(rng, 0.0, 1.0 / p);
      for (double& v : a2) v = uniform(rng, 0.0, 1.0 / q);
    } while (a1[0] == a1[1] && a2[0] == a2[1]);

    const DscMargin m = dsc_margin(gram(d.h1), gram(d.h2), rho1, rho2, p, a1, a2);
    const double c = m.combined;
    const double c_direct = m.derivative;

    const std::string ctx = describe({{"trial", static_cast<double>(t)},
                                      {"p", p},
                                      {"alpha1'", a1[0]},
                                      {"alpha1''", a1[1]},
                                      {"alpha2'", a2[0]},
                                      {"alpha2''", a2[1]},
                                      {"C", c}});
    acc.add(c, kPropertySlack, ctx);
    const double mismatch = std::abs(c - c_direct) / std::max(1.0, std::abs(c));
    identity.add(-mismatch, 1e-9, ctx);
  }
  if (!identity.result.passed) {
    acc.result.passed = false;
    if (acc.result.counterexample.empty())
      acc.result.counterexample = "matrix and derivative forms disagree: " + identity.result.counterexample;
  }
  return acc.result;
}

std::vector<CheckResult> verify_trace_lemmas(std::size_t trials, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw DomainError("verify_trace_lemmas: dim must be >= 1");
  CheckAccumulator l1("lemma1-trace-sum");
  CheckAccumulator l2("lemma2-trace-product");
  CheckAccumulator l3("lemma3-inverse-difference");
  CheckAccumulator lb("ordered-eigenvalue-bound");
  const CMatrix eye = CMatrix::identity(dim);

  for (std::size_t t = 0; t < trials; ++t) {
    const std::string ctx = "trial " + std::to_string(t);
    {
      // Total order within each pair from the scalar-multiple construction A = a H H^H.
      Philox rng(trial_seed(mix64(seed ^ 0x11), t));
      const CMatrix g1 = gram(random_gaussian(rng, dim, dim));
      const CMatrix g2 = gram(random_gaussian(rng, dim, dim));
      double a[2];
      double b[2];
      do {
        for (double& v : a) v = uniform(rng, 0.0, 5.0);
        for (double& v : b) v = uniform(rng, 0.0, 5.0);
      } while (a[0] == a[1] && b[0] == b[1]);
      l1.add(lemma_trace(a[0] * g1, a[1] * g1, b[0] * g2, b[1] * g2), kPropertySlack,
             ctx + ": " + describe({{"a'", a[0]}, {"a''", a[1]}, {"b'", b[0]}, {"b''", b[1]}}));
    }
    {
      // M Hermitian PSD, N = PSD + skew-Hermitian (non-negative, not Hermitian).
      Philox rng(trial_seed(mix64(seed ^ 0x22), t));
      const CMatrix m = gram(random_gaussian(rng, dim, dim));
      const CMatrix x = random_gaussian(rng, dim, dim);
      const CMatrix n = gram(random_gaussian(rng, dim, dim)) + cplx(0.5) * (x - x.adjoint());
      l2.add(re_trace(m * n), kPropertySlack, ctx);
    }
    {
      Philox rng(trial_seed(mix64(seed ^ 0x33), t));
      const CMatrix x = gram(random_gaussian(rng, dim, dim)) + cplx(1e-3) * eye;
      const CMatrix y = gram(random_gaussian(rng, dim, dim)) + cplx(1e-3) * eye;
      l3.add(inverse_difference_trace(x, y), kPropertySlack, ctx);
    }
    {
      Philox rng(trial_seed(mix64(seed ^ 0x44), t));
      const CMatrix x = gram(random_gaussian(rng, dim, dim));
      const CMatrix y = gram(random_gaussian(rng, dim, dim));
      const auto lx = hermitian_eigenvalues(HermitianMatrix(x));
      const auto ly = hermitian_eigenvalues(HermitianMatrix(y));
      double bound = 0.0;
      for (std::size_t i = 0; i < dim; ++i) bound += lx[i] * ly[dim - 1 - i];
      lb.add(re_trace(x * y) - bound, kPropertySlack, ctx);
    }
  }
  return {l1.result, l2.result, l3.result, lb.result};
}

std::vector<CheckResult> verify_concavity(const ChannelScenario& scenario, double step, const McConfig& mc) {
  if (!(step > 0.0)) throw DomainError("verify_concavity: step must be positive");
  const double p = scenario.p;
  if (!(p > 0.0 && p < 1.0)) throw DomainError("verify_concavity: p must lie in (0, 1)");
  const LargeSystemModel model(scenario);
  const double rho1 = scenario.eta * scenario.power_1;
  const double rho2 = scenario.eta * scenario.power_2;
  std::vector<CheckResult> out;

  for (int user : {1, 2}) {
    const double hi = TpaProfile::action_upper(user, p);
    const auto n = static_cast<std::size_t>(std::floor(hi / step + 1e-9));
    std::vector<double> grid;
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(std::min(hi, static_cast<double>(i) * step));
    const double opponent = 1.0;
    auto profile = [&](double a) { return user == 1 ? TpaProfile(a, opponent, p) : TpaProfile(opponent, a, p); };

    CheckAccumulator approx("concavity-approx-user" + std::to_string(user));
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) u[i] = model.tpa_utility(profile(grid[i]), user);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
      approx.add(-(u[i - 1] - 2.0 * u[i] + u[i + 1]), 0.0, "alpha = " + std::to_string(grid[i]));
    out.push_back(approx.result);

    // Monte Carlo utility on shared draws; TPA precoders are scaled identities.
    const auto samples = sample_trials(scenario, mc, grid.size(), [&](const ChannelDraw& d, std::span<double> row) {
      const CMatrix g1 = gram(d.h1);
      const CMatrix g2 = gram(d.h2);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const TpaProfile pr = profile(grid[i]);
        const double c11 = rho1 * pr.fraction(1, 1);
        const double c21 = rho2 * pr.fraction(2, 1);
        const double c12 = rho1 * pr.fraction(1, 2);
        const double c22 = rho2 * pr.fraction(2, 2);
        if (user == 1) {
          row[i] = p * gram_logdet(g1, g2, c11, 0.0) +
                   (1.0 - p) * (gram_logdet(g1, g2, c12, c22) - gram_logdet(g1, g2, 0.0, c22));
        } else {
          row[i] = (1.0 - p) * gram_logdet(g1, g2, 0.0, c22) +
                   p * (gram_logdet(g1, g2, c11, c21) - gram_logdet(g1, g2, c11, 0.0));
        }
      }
    });
    CheckAccumulator exact("concavity-mc-user" + std::to_string(user));
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      std::fill(w.begin(), w.end(), 0.0);
      w[i - 1] = 1.0;
      w[i] = -2.0;
      w[i + 1] = 1.0;
      exact.add(-samples.combine(w).mean, 0.0, "alpha = " + std::to_string(grid[i]));
    }
    out.push_back(exact.result);
  }
  return out;
}

}  // namespace mimomac
