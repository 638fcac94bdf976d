// SPDX-License-Identifier: Apache-2.0
#include "mimomac/channel.hpp"

#include <cmath>
#include <string>

#include "mimomac/errors.hpp"
#include "mimomac/random.hpp"

namespace mimomac {

namespace {

void check_correlation(const HermitianMatrix& m, std::size_t dim, const char* name) {
  if (m.dim() != dim) {
    throw DomainError(std::string(name) + ": expected dimension " + std::to_string(dim) + ", got " +
                      std::to_string(m.dim()));
  }
  if (std::abs(m.trace() - static_cast<double>(dim)) > 1e-9) {
    throw DomainError(std::string(name) + ": trace must equal its dimension");
  }
  if (!is_psd(m)) throw DomainError(std::string(name) + ": matrix is not positive semidefinite");
}

bool is_identity(const HermitianMatrix& m) { return m.matrix() == CMatrix::identity(m.dim()); }

}  // namespace

void ChannelScenario::validate() const {
  if (n_t == 0 || n_r == 0) throw DomainError("scenario: antenna counts must be positive");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("scenario: eta must be finite and >= 0");
  if (!(power_1 >= 0.0) || !(power_2 >= 0.0)) throw DomainError("scenario: powers must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("scenario: p must lie in [0, 1]");
  check_correlation(rx_corr, n_r, "receive correlation");
  check_correlation(tx_corr_1, n_t, "transmit correlation of user 1");
  check_correlation(tx_corr_2, n_t, "transmit correlation of user 2");
}

ChannelScenario ChannelScenario::uncorrelated(std::size_t n, double eta, double power_1, double power_2, double p) {
  ChannelScenario s;
  s.n_t = n;
  s.n_r = n;
  s.eta = eta;
  s.power_1 = power_1;
  s.power_2 = power_2;
  s.rx_corr = HermitianMatrix::identity(n);
  s.tx_corr_1 = HermitianMatrix::identity(n);
  s.tx_corr_2 = HermitianMatrix::identity(n);
  s.p = p;
  return s;
}

ChannelSampler::ChannelSampler(const ChannelScenario& scenario)
    : scenario_(scenario),
      rx_identity_(is_identity(scenario.rx_corr)),
      tx_identity_1_(is_identity(scenario.tx_corr_1)),
      tx_identity_2_(is_identity(scenario.tx_corr_2)) {
  scenario_.validate();
  if (!rx_identity_) rx_sqrt_ = psd_sqrt(scenario.rx_corr).matrix();
  if (!tx_identity_1_) tx_sqrt_1_ = psd_sqrt(scenario.tx_corr_1).matrix();
  if (!tx_identity_2_) tx_sqrt_2_ = psd_sqrt(scenario.tx_corr_2).matrix();
}

CMatrix ChannelSampler::shape(const CMatrix& theta, int user) const {
  CMatrix h = rx_identity_ ? theta : rx_sqrt_ * theta;
  const bool tx_id = user == 1 ? tx_identity_1_ : tx_identity_2_;
  if (!tx_id) h = h * (user == 1 ? tx_sqrt_1_ : tx_sqrt_2_);
  return h;
}

ChannelDraw ChannelSampler::draw(std::uint64_t seed) const {
  Philox rng(seed);
  const double variance = 1.0 / static_cast<double>(scenario_.n_t);
  CMatrix theta1(scenario_.n_r, scenario_.n_t);
  CMatrix theta2(scenario_.n_r, scenario_.n_t);
  for (auto& z : theta1.data()) z = rng.next_complex_gaussian(variance);
  for (auto& z : theta2.data()) z = rng.next_complex_gaussian(variance);
  return ChannelDraw{shape(theta1, 1), shape(theta2, 2), seed};
}

ChannelDraw draw_channels(const ChannelScenario& scenario, std::uint64_t seed) {
  return ChannelSampler(scenario).draw(seed);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace mimomac
