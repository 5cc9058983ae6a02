// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "sepenv/expr.hpp"
#include "sepenv/geometry.hpp"
#include "sepenv/pou.hpp"
#include "sepenv/shellmax.hpp"

namespace sepenv {

/// Everything needed to build an envelope besides the function itself.
struct EnvelopeConfig {
  Schedule schedule_m{};
  Schedule schedule_n{};
  SmoothstepProfile profile = SmoothstepProfile::polynomial(3);
  double margin = 0.1;
  Lift lift = Lift::Linf;
  MaxBackend backend = IntervalBackend{};
  ShellOptions shells{};
};

/// F(t) = sum_i phi_i(t) A_i and G(x) = sum_i chi_i(x) A_i with
/// f(t, x) <= F(t) + G(x) wherever the A_i are certified.
class AdditiveEnvelope {
 public:
  AdditiveEnvelope(std::shared_ptr<const ShellMaxima> shells, PartitionOfUnity pou_m, PartitionOfUnity pou_n);

  double eval_F(std::span<const double> t) const;
  double eval_G(std::span<const double> x) const;

  /// Computes A_1..A_{i_max} up front.
  void precompute(std::size_t i_max) const { shells_->precompute(i_max); }

  const ShellMaxima& shells() const { return *shells_; }
  const PartitionOfUnity& pou_m() const { return pou_m_; }
  const PartitionOfUnity& pou_n() const { return pou_n_; }
  const Expr& function() const { return shells_->function(); }

 private:
  double combine(const PartitionOfUnity::Weights& w) const;

  std::shared_ptr<const ShellMaxima> shells_;
  PartitionOfUnity pou_m_;
  PartitionOfUnity pou_n_;
};

AdditiveEnvelope build_additive(const Expr& f, const EnvelopeConfig& cfg);

/// Envelope of pointwise_max(fs); dominates every member.
AdditiveEnvelope build_additive_family(const std::vector<Expr>& fs, const EnvelopeConfig& cfg);

/// phi(t) psi(x) <= f(t, x) <= F(t) G(x) for strictly positive f, with
/// F = exp(F~), G = exp(G~) from the additive envelope of f and
/// phi = 1 / exp(F^), psi = 1 / exp(G^) from the additive envelope of 1/f.
class MultiplicativeEnvelope {
 public:
  MultiplicativeEnvelope(AdditiveEnvelope upper, AdditiveEnvelope lower)
      : upper_(std::move(upper)), lower_(std::move(lower)) {}

  double eval_F(std::span<const double> t) const;
  double eval_G(std::span<const double> x) const;
  double eval_phi(std::span<const double> t) const;
  double eval_psi(std::span<const double> x) const;

  /// Logarithms of the four factors; finite even where exp over- or
  /// underflows (phi and psi reach 0 once F^ or G^ exceeds about 745).
  double log_F(std::span<const double> t) const { return upper_.eval_F(t); }
  double log_G(std::span<const double> x) const { return upper_.eval_G(x); }
  double log_phi(std::span<const double> t) const;
  double log_psi(std::span<const double> x) const;

  /// F~ and G~ (of f), F^ and G^ (of 1/f).
  const AdditiveEnvelope& upper_additive() const { return upper_; }
  const AdditiveEnvelope& lower_additive() const { return lower_; }

 private:
  void require_positive_through(std::size_t i) const { upper_.precompute(i); }

  AdditiveEnvelope upper_;
  AdditiveEnvelope lower_;
};

/// Fails with PositivityError on the first of shells 1..precheck_shells
/// where f is not certified positive; later shells are checked lazily.
MultiplicativeEnvelope build_multiplicative(const Expr& f, const EnvelopeConfig& cfg, std::size_t precheck_shells = 1);

/// For a compact factor given as a box: the other-side bound
/// y -> certified max of f over (box x {y}) (or ({y} x box)).
class CompactFactorBound {
 public:
  CompactFactorBound(Expr f, Side compact_side, Box box, MaxBackend backend);

  double operator()(std::span<const double> other) const;

  Side compact_side() const { return side_; }

 private:
  Expr f_;
  Side side_;
  Box box_;
  MaxBackend backend_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<double>, double> cache_;
};

std::unique_ptr<CompactFactorBound> compact_factor_bound(const Expr& f, Side compact_side, const Box& box,
                                                         const MaxBackend& backend);

}  // namespace sepenv
