// SPDX-License-Identifier: Apache-2.0
#include "sepenv/pou.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sepenv {

SmoothstepProfile::SmoothstepProfile(Kind kind, int order) : kind_(kind), order_(order) {
  if (kind == Kind::Polynomial) {
    // C(k + j, j) by the recurrence C(k+j, j) = C(k+j-1, j-1) * (k+j) / j.
    binomials_.resize(static_cast<std::size_t>(order) + 1);
    binomials_[0] = 1.0;
    for (int j = 1; j <= order; ++j) binomials_[j] = binomials_[j - 1] * (order + j) / j;
  }
}

SmoothstepProfile SmoothstepProfile::polynomial(int order) {
  if (order < 1) throw std::invalid_argument("polynomial smoothstep order must be >= 1");
  if (order > 30) throw std::invalid_argument("polynomial smoothstep order must be <= 30");
  return SmoothstepProfile(Kind::Polynomial, order);
}

SmoothstepProfile SmoothstepProfile::exponential() { return SmoothstepProfile(Kind::Exponential, 0); }

SmoothstepProfile make_profile(SmoothstepProfile::Kind kind, int order) {
  return kind == SmoothstepProfile::Kind::Polynomial ? SmoothstepProfile::polynomial(order)
                                                     : SmoothstepProfile::exponential();
}

double SmoothstepProfile::operator()(double u) const {
  if (!(u > 0.0)) return 0.0;
  if (u >= 1.0) return 1.0;
  if (kind_ == Kind::Exponential) {
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
  }
  // s(u) = u^{k+1} * sum_j C(k+j, j) (1-u)^j, evaluated on the half where it
  // is small and mirrored through s(u) = 1 - s(1-u) on the other half.
  const bool mirror = u > 0.5;
  const double w = mirror ? 1.0 - u : u;
  const double v = 1.0 - w;
  double sum = 0.0;
  for (std::size_t j = binomials_.size(); j-- > 0;) sum = sum * v + binomials_[j];
  const double s = std::clamp(std::pow(w, order_ + 1) * sum, 0.0, 1.0);
  return mirror ? 1.0 - s : s;
}

PartitionOfUnity::PartitionOfUnity(Exhaustion exhaustion, SmoothstepProfile profile, double margin, Lift lift)
    : exhaustion_(std::move(exhaustion)), profile_(std::move(profile)), margin_(margin), lift_(lift) {
  if (!(margin > 0.0 && margin < 1.0)) throw std::invalid_argument("support margin must lie in (0, 1)");
}

double PartitionOfUnity::transition_end(std::size_t i) const {
  const double lo = exhaustion_.radius(i - 1), hi = exhaustion_.radius(i);
  return hi - margin_ * (hi - lo);
}

double PartitionOfUnity::radius_of(std::span<const double> p) const {
  return lift_ == Lift::Linf ? linf_norm(p) : l2_norm(p);
}

double PartitionOfUnity::cutoff(std::size_t i, double rho) const {
  if (i == 0) return 0.0;
  const double a = transition_start(i);
  const double b = transition_end(i);
  if (rho <= a) return 1.0;
  if (rho >= b) return 0.0;
  return 1.0 - profile_((rho - a) / (b - a));
}

double PartitionOfUnity::phi_at_radius(std::size_t i, double rho) const {
  if (i == 0) return 0.0;
  return cutoff(i, rho) - cutoff(i - 1, rho);
}

double PartitionOfUnity::phi(std::size_t i, std::span<const double> p) const { return phi_at_radius(i, radius_of(p)); }

PartitionOfUnity::Weights PartitionOfUnity::weights_at_radius(double rho) const {
  // With j the first ball containing rho, g_{j-1}(rho) = 0 and g_{j+1}(rho) = 1,
  // so only phi_j = g_j and phi_{j+1} = 1 - g_j can be nonzero.
  const std::size_t j = exhaustion_.shell_index_of_radius(rho);
  return {j, 1.0 - cutoff(j, rho)};
}

PartitionOfUnity::Weights PartitionOfUnity::weights(std::span<const double> p) const {
  return weights_at_radius(radius_of(p));
}

ActiveRange PartitionOfUnity::active_indices(std::span<const double> p) const {
  const Weights w = weights(p);
  if (w.next_weight == 0.0) return {w.first, w.first};
  if (w.next_weight == 1.0) return {w.first + 1, w.first + 1};
  return {w.first, w.first + 1};
}

}  // namespace sepenv
