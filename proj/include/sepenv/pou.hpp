// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sepenv/geometry.hpp"

namespace sepenv {

/// Monotone transition s: [0,1] -> [0,1] with s(0) = 0 and s(1) = 1.
/// Polynomial(k) is the degree 2k+1 Hermite step with k vanishing
/// derivatives at both ends (C^k once extended by constants); Exponential is
/// the C-infinity step sigma(u) / (sigma(u) + sigma(1-u)), sigma(u) = exp(-1/u).
class SmoothstepProfile {
 public:
  enum class Kind { Polynomial, Exponential };

  static SmoothstepProfile polynomial(int order);
  static SmoothstepProfile exponential();

  Kind kind() const { return kind_; }
  int order() const { return order_; }

  /// Clamps u to [0,1] first.
  double operator()(double u) const;

  friend bool operator==(const SmoothstepProfile& a, const SmoothstepProfile& b) {
    return a.kind_ == b.kind_ && a.order_ == b.order_;
  }

 private:
  SmoothstepProfile(Kind kind, int order);

  Kind kind_;
  int order_;
  std::vector<double> binomials_;  // C(k + j, j), j = 0..k
};

SmoothstepProfile make_profile(SmoothstepProfile::Kind kind, int order = 3);

enum class Lift { Linf, L2 };

/// Inclusive index range [first, last]; never more than two indices.
struct ActiveRange {
  std::size_t first = 1;
  std::size_t last = 1;
  friend bool operator==(const ActiveRange&, const ActiveRange&) = default;
};

/// Locally finite partition of unity on R^d subordinate to the open balls
/// U_i of an exhaustion, built from telescoped radial cutoffs:
///   phi_i(p) = g_i(|p|) - g_{i-1}(|p|),  g_0 = 0,
/// where g_i is 1 on [0, r_{i-1}], falls through the profile on
/// [r_{i-1}, r_i - margin * (r_i - r_{i-1})] and is 0 beyond.
class PartitionOfUnity {
 public:
  PartitionOfUnity(Exhaustion exhaustion, SmoothstepProfile profile, double margin = 0.1, Lift lift = Lift::Linf);

  const Exhaustion& exhaustion() const { return exhaustion_; }
  const SmoothstepProfile& profile() const { return profile_; }
  double margin() const { return margin_; }
  Lift lift() const { return lift_; }

  double transition_start(std::size_t i) const { return exhaustion_.radius(i - 1); }
  double transition_end(std::size_t i) const;

  /// Radial coordinate under the configured lift.
  double radius_of(std::span<const double> p) const;

  /// g_i(rho).
  double cutoff(std::size_t i, double rho) const;

  double phi(std::size_t i, std::span<const double> p) const;
  double phi_at_radius(std::size_t i, double rho) const;

  ActiveRange active_indices(std::span<const double> p) const;

  /// Nonzero weights at p: phi_{first} = 1 - next_weight and
  /// phi_{first+1} = next_weight; every other phi_i vanishes.
  struct Weights {
    std::size_t first = 1;
    double next_weight = 0.0;
  };
  Weights weights(std::span<const double> p) const;
  Weights weights_at_radius(double rho) const;

 private:
  Exhaustion exhaustion_;
  SmoothstepProfile profile_;
  double margin_;
  Lift lift_;
};

}  // namespace sepenv
