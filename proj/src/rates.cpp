// SPDX-License-Identifier: Apache-2.0
#include "mimomac/rates.hpp"

#include <string>

#include "mimomac/errors.hpp"

namespace mimomac {

namespace {

void check_dims(const ChannelScenario& scenario, const HermitianMatrix& q, const char* name) {
  if (q.dim() != scenario.n_t) {
    throw DomainError(std::string(name) + ": precoder dimension " + std::to_string(q.dim()) + " does not match n_t = " +
                      std::to_string(scenario.n_t));
  }
}

void check_state(int state) {
  if (state != 1 && state != 2) throw DomainError("invalid coordination state " + std::to_string(state));
}

CMatrix scaled_gram(const CMatrix& h, double scale) {
  CMatrix g = gram(h);
  g *= scale;
  return g;
}

}  // namespace

Precoder::Precoder(const HermitianMatrix& q) {
  const CMatrix& m = q.matrix();
  const std::size_t n = m.rows();
  bool diagonal_equal = true;
  for (std::size_t i = 0; i < n && diagonal_equal; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i != j && m(i, j) != cplx{}) || (i == j && m(i, i) != m(0, 0))) {
        diagonal_equal = false;
        break;
      }
  if (diagonal_equal) {
    scale_ = n > 0 ? m(0, 0).real() : 0.0;
    if (scale_ < 0.0) throw DomainError("precoder must be positive semidefinite");
    zero_ = scale_ == 0.0;
    scaled_identity_ = true;
    return;
  }
  factor_ = psd_sqrt(q).matrix();
  zero_ = max_abs(factor_) == 0.0;
}

CMatrix Precoder::covariance(const CMatrix& h, double eta) const {
  if (scaled_identity_) return scaled_gram(h, eta * scale_);
  return scaled_gram(h * factor_, eta);
}

double draw_logdet(const ChannelDraw& draw, double eta, const Precoder* q1, const Precoder* q2) {
  const bool has1 = q1 != nullptr && !q1->is_zero();
  const bool has2 = q2 != nullptr && !q2->is_zero();
  if (eta == 0.0) return 0.0;
  if (has1 && has2) return log2det_identity_plus(q1->covariance(draw.h1, eta) + q2->covariance(draw.h2, eta));
  if (has1) return log2det_identity_plus(q1->covariance(draw.h1, eta));
  if (has2) return log2det_identity_plus(q2->covariance(draw.h2, eta));
  return 0.0;
}

Estimate ergodic_logdet(const ChannelScenario& scenario, const std::optional<HermitianMatrix>& q1,
                        const std::optional<HermitianMatrix>& q2, const McConfig& mc) {
  if (q1) check_dims(scenario, *q1, "ergodic_logdet");
  if (q2) check_dims(scenario, *q2, "ergodic_logdet");
  const std::optional<Precoder> f1 = q1 ? std::optional<Precoder>(Precoder(*q1)) : std::nullopt;
  const std::optional<Precoder> f2 = q2 ? std::optional<Precoder>(Precoder(*q2)) : std::nullopt;
  const auto samples = sample_trials(scenario, mc, 1, [&](const ChannelDraw& d, std::span<double> out) {
    out[0] = draw_logdet(d, scenario.eta, f1 ? &*f1 : nullptr, f2 ? &*f2 : nullptr);
  });
  return samples.estimate(0);
}

namespace {

// Columns: joint, single user 1, single user 2.
McSamples sample_one_state(const ChannelScenario& scenario, const HermitianMatrix& q1, const HermitianMatrix& q2,
                           const McConfig& mc) {
  check_dims(scenario, q1, "rate pair");
  check_dims(scenario, q2, "rate pair");
  const Precoder f1(q1);
  const Precoder f2(q2);
  return sample_trials(scenario, mc, 3, [&](const ChannelDraw& d, std::span<double> out) {
    out[0] = draw_logdet(d, scenario.eta, &f1, &f2);
    out[1] = draw_logdet(d, scenario.eta, &f1, nullptr);
    out[2] = draw_logdet(d, scenario.eta, nullptr, &f2);
  });
}

}  // namespace

RatePair sic_rate_pair(const ChannelScenario& scenario, int state, const HermitianMatrix& q1, const HermitianMatrix& q2,
                       const McConfig& mc) {
  check_state(state);
  const auto s = sample_one_state(scenario, q1, q2, mc);
  const double w_last1[3] = {0.0, 1.0, 0.0};
  const double w_first1[3] = {1.0, 0.0, -1.0};
  const double w_last2[3] = {0.0, 0.0, 1.0};
  const double w_first2[3] = {1.0, -1.0, 0.0};
  RatePair out;
  out.r1 = s.combine(state == 1 ? w_last1 : w_first1);
  out.r2 = s.combine(state == 2 ? w_last2 : w_first2);
  out.sum = s.estimate(0);
  return out;
}

RatePair sud_rate_pair(const ChannelScenario& scenario, const HermitianMatrix& q1, const HermitianMatrix& q2,
                       const McConfig& mc) {
  const auto s = sample_one_state(scenario, q1, q2, mc);
  const double w1[3] = {1.0, 0.0, -1.0};
  const double w2[3] = {1.0, -1.0, 0.0};
  const double ws[3] = {2.0, -1.0, -1.0};
  return {s.combine(w1), s.combine(w2), s.combine(ws)};
}

StatePrecoders tpa_precoders(const ChannelScenario& scenario, const TpaProfile& profile) {
  StatePrecoders q;
  for (int s = 1; s <= kStates; ++s)
    for (int k = 1; k <= 2; ++k) {
      CMatrix m = CMatrix::identity(scenario.n_t);
      m *= profile.fraction(k, s) * scenario.power(k);
      q[s - 1][k - 1] = HermitianMatrix(std::move(m));
    }
  return q;
}

void check_feasible(const ChannelScenario& scenario, const SpaProfile& profile) {
  for (int k = 1; k <= 2; ++k)
    for (int s = 1; s <= kStates; ++s) profile.at(k, s).check_feasible(scenario.n_t, scenario.power(k), k, s);
}

StatePrecoders spa_precoders(const ChannelScenario& scenario, const SpaProfile& profile) {
  check_feasible(scenario, profile);
  StatePrecoders q;
  for (int k = 1; k <= 2; ++k) {
    const auto eig = hermitian_eig(scenario.tx_corr(k));
    const std::size_t n = scenario.n_t;
    for (int s = 1; s <= kStates; ++s) {
      const auto& powers = profile.at(k, s).powers;
      CMatrix m(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          cplx acc = 0.0;
          for (std::size_t l = 0; l < n; ++l) acc += eig.vectors(i, l) * powers[l] * std::conj(eig.vectors(j, l));
          m(i, j) = acc;
        }
      q[s - 1][k - 1] = HermitianMatrix::hermitian_part(m);
    }
  }
  return q;
}

McSamples sample_state_logdets(const ChannelScenario& scenario, const StatePrecoders& q, const McConfig& mc) {
  std::array<std::array<std::optional<Precoder>, 2>, kStates> f;
  for (int s = 0; s < kStates; ++s)
    for (int k = 0; k < 2; ++k) {
      check_dims(scenario, q[s][k], "state precoders");
      f[s][k].emplace(q[s][k]);
    }
  return sample_trials(scenario, mc, columns::kCount, [&](const ChannelDraw& d, std::span<double> out) {
    for (int s = 0; s < kStates; ++s) {
      const Precoder* f1 = &*f[s][0];
      const Precoder* f2 = &*f[s][1];
      out[columns::kJoint[s]] = draw_logdet(d, scenario.eta, f1, f2);
      out[columns::kSingle1[s]] = draw_logdet(d, scenario.eta, f1, nullptr);
      out[columns::kSingle2[s]] = draw_logdet(d, scenario.eta, nullptr, f2);
    }
  });
}

std::array<double, columns::kCount> utility_weights(int user, double p) {
  std::array<double, columns::kCount> w{};
  const double q = 1.0 - p;
  if (user == 1) {
    // State 1: decoded last. State 2: joint minus user 2's own term.
    w[columns::kSingle1[0]] += p;
    w[columns::kJoint[1]] += q;
    w[columns::kSingle2[1]] -= q;
  } else {
    w[columns::kJoint[0]] += p;
    w[columns::kSingle1[0]] -= p;
    w[columns::kSingle2[1]] += q;
  }
  return w;
}

RatePair utilities(const ChannelScenario& scenario, const StatePrecoders& q, const McConfig& mc) {
  const auto s = sample_state_logdets(scenario, q, mc);
  const auto w1 = utility_weights(1, scenario.p);
  const auto w2 = utility_weights(2, scenario.p);
  std::array<double, columns::kCount> ws{};
  for (std::size_t j = 0; j < ws.size(); ++j) ws[j] = w1[j] + w2[j];
  return {s.combine(w1), s.combine(w2), s.combine(ws)};
}

Estimate utility(const ChannelScenario& scenario, const TpaProfile& profile, int user, const McConfig& mc) {
  if (profile.p() != scenario.p) throw ConstraintError("TPA profile built for a different p than the scenario");
  const auto s = sample_state_logdets(scenario, tpa_precoders(scenario, profile), mc);
  return s.combine(utility_weights(user, scenario.p));
}

Estimate utility(const ChannelScenario& scenario, const SpaProfile& profile, int user, const McConfig& mc) {
  const auto s = sample_state_logdets(scenario, spa_precoders(scenario, profile), mc);
  return s.combine(utility_weights(user, scenario.p));
}

}  // namespace mimomac
