// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepenv/envelope.hpp"
#include "sepenv/pou.hpp"
#include "sepenv/shellmax.hpp"

namespace sepenv {

struct VerificationReport {
  std::string check;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::vector<double> worst_point;  // empty when there is no violation
  double worst_magnitude = 0.0;
  std::map<std::string, double> stats;
  double elapsed_seconds = 0.0;  // metadata; not part of reproducible content

  bool passed() const { return violations == 0; }
};

struct SamplerConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  /// Points are drawn with each factor in [-r_k, r_k]^d, r_k the radius of
  /// shell `shells` of that factor's exhaustion.
  std::size_t shells = 10;
  /// Fraction of samples moved onto the transition bands of the partition.
  double boundary_fraction = 0.2;
  /// Allow f to exceed F + G by 4 ulp (for the l2 lift). Off: exact.
  bool ulp_slack = false;
};

/// f(t, x) <= F(t) + G(x) at sampled points, exact comparison.
VerificationReport check_domination(const AdditiveEnvelope& env, const Expr& f, const SamplerConfig& sampler);

/// Sums to one (1e-12), support strictly inside U_i, exact vanishing below
/// the shell index, at `samples` random radii up to r_{shells}, plus the
/// smoothness check at the transition endpoints of shells 2..5.
VerificationReport check_partition(const PartitionOfUnity& pou, const SamplerConfig& sampler);

struct SmoothnessResult {
  double jump_coarse = 0.0;  // |D+ - D-| at step h
  double jump_fine = 0.0;    // ... at step h/4
  double scale = 0.0;        // max |D| over the transition interior
  bool passed = false;
};

/// Continuity of the order-th derivative of rho -> g_i(rho) at a transition
/// endpoint (at_end false: r_{i-1}; true: r_i - margin (r_i - r_{i-1})).
/// One-sided order-th differences D- and D+ with steps h = transition/100
/// and h/4; continuous iff the jump shrinks under refinement:
///   jump_fine <= jump_coarse / 2 + 1e-4 * scale.
/// A discontinuous derivative keeps a nonzero jump and fails.
SmoothnessResult smoothness_at(const PartitionOfUnity& pou, std::size_t i, bool at_end, int order);

/// Derivative orders the profile is required to be continuous in:
/// 1..k for polynomial(k), 1..4 for the exponential profile.
int required_smoothness(const SmoothstepProfile& profile);

/// phi(t) psi(x) <= f(t, x) <= F(t) G(x) and F G = exp(F~ + G~) within
/// 4 ulp of a long double reference.
VerificationReport check_multiplicative(const MultiplicativeEnvelope& env, const Expr& f, const SamplerConfig& sampler);

struct OracleCase {
  Expr e;
  Box box;
};

/// certified_max upper >= dense-grid max (per_axis nodes per axis) for every
/// case; gap statistics in stats.
VerificationReport check_oracle_equivalence(const MaxBackend& backend, const std::vector<OracleCase>& corpus,
                                            std::size_t per_axis = 200);

/// Max of e over a tensor grid with per_axis nodes per axis (endpoints
/// included), evaluated in batches.
double dense_grid_max(const Expr& e, const Box& box, std::size_t per_axis);

/// Copy of env whose shell-table entry `shell` is multiplied by `factor`
/// (a frozen table of the first `through` shells). For sensitivity controls.
AdditiveEnvelope corrupt_shell(const AdditiveEnvelope& env, std::size_t shell, double factor, std::size_t through);

}  // namespace sepenv
