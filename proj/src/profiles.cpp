// SPDX-License-Identifier: Apache-2.0
#include "mimomac/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mimomac/errors.hpp"

namespace mimomac {

namespace {
constexpr double kSlack = 1e-12;
}

double TpaProfile::action_upper(int user, double p) noexcept {
  const double pk = user == 1 ? p : 1.0 - p;
  return pk > 0.0 ? 1.0 / pk : std::numeric_limits<double>::infinity();
}

TpaProfile::TpaProfile(double alpha_1, double alpha_2, double p) : alpha_1_(alpha_1), alpha_2_(alpha_2), p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConstraintError("TPA profile: p must lie in [0, 1]");
  for (int user : {1, 2}) {
    const double a = own(user);
    const double hi = action_upper(user, p);
    if (!(a >= -kSlack && a <= hi * (1.0 + kSlack))) {
      throw ConstraintError("temporal power constraint violated for user " + std::to_string(user) + ": alpha_" +
                            std::to_string(user) + " = " + std::to_string(a) + " outside [0, 1/p_" +
                            std::to_string(user) + "]");
    }
  }
  alpha_1_ = std::max(alpha_1_, 0.0);
  alpha_2_ = std::max(alpha_2_, 0.0);
}

double TpaProfile::fraction(int user, int state) const noexcept {
  if (user == state) return own(user);
  // Off-state fraction: (1 - p_k a_k) / (1 - p_k).
  const double pk = user == 1 ? p_ : 1.0 - p_;
  if (pk >= 1.0) return 0.0;
  return std::max(0.0, (1.0 - pk * own(user)) / (1.0 - pk));
}

double EigenLoading::total() const noexcept { return std::accumulate(powers.begin(), powers.end(), 0.0); }

void EigenLoading::check_feasible(std::size_t n_t, double power, int user, int state) const {
  const std::string where = " (user " + std::to_string(user) + ", state " + std::to_string(state) + ")";
  if (powers.size() != n_t) throw ConstraintError("spatial loading has wrong length" + where);
  for (double v : powers)
    if (!(v >= 0.0)) throw ConstraintError("spatial loading has a negative power" + where);
  if (total() > static_cast<double>(n_t) * power + 1e-9)
    throw ConstraintError("spatial power constraint Tr(Q) <= n_t P_k violated" + where);
}

EigenLoading EigenLoading::uniform(std::size_t n_t, double power) { return {std::vector<double>(n_t, power)}; }

}  // namespace mimomac
