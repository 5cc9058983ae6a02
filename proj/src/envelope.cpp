// SPDX-License-Identifier: Apache-2.0
#include "sepenv/envelope.hpp"

#include <cmath>

namespace sepenv {

AdditiveEnvelope::AdditiveEnvelope(std::shared_ptr<const ShellMaxima> shells, PartitionOfUnity pou_m,
                                   PartitionOfUnity pou_n)
    : shells_(std::move(shells)), pou_m_(std::move(pou_m)), pou_n_(std::move(pou_n)) {}

// A_j + w (A_{j+1} - A_j) rather than (1-w) A_j + w A_{j+1}: for a
// nondecreasing table the rounded result can never drop below A_j, which
// keeps the domination inequality exact in floating point.
double AdditiveEnvelope::combine(const PartitionOfUnity::Weights& w) const {
  const double a = shells_->shell_max(w.first);
  if (w.next_weight == 0.0) return a;
  const double b = shells_->shell_max(w.first + 1);
  if (w.next_weight == 1.0) return b;
  return a + w.next_weight * (b - a);
}

double AdditiveEnvelope::eval_F(std::span<const double> t) const {
  if (t.size() != static_cast<std::size_t>(pou_m_.exhaustion().dim()))
    throw DimensionMismatch("F expects a point of dimension m");
  return combine(pou_m_.weights(t));
}

double AdditiveEnvelope::eval_G(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(pou_n_.exhaustion().dim()))
    throw DimensionMismatch("G expects a point of dimension n");
  return combine(pou_n_.weights(x));
}

AdditiveEnvelope build_additive(const Expr& f, const EnvelopeConfig& cfg) {
  Exhaustion ex_m(f.m(), cfg.schedule_m), ex_n(f.n(), cfg.schedule_n);
  auto shells = std::make_shared<const ShellMaxima>(f, ProductExhaustion(ex_m, ex_n), cfg.backend, cfg.shells);
  return AdditiveEnvelope(std::move(shells), PartitionOfUnity(ex_m, cfg.profile, cfg.margin, cfg.lift),
                          PartitionOfUnity(ex_n, cfg.profile, cfg.margin, cfg.lift));
}

AdditiveEnvelope build_additive_family(const std::vector<Expr>& fs, const EnvelopeConfig& cfg) {
  return build_additive(pointwise_max(fs), cfg);
}

double MultiplicativeEnvelope::eval_F(std::span<const double> t) const { return std::exp(upper_.eval_F(t)); }
double MultiplicativeEnvelope::eval_G(std::span<const double> x) const { return std::exp(upper_.eval_G(x)); }

double MultiplicativeEnvelope::eval_phi(std::span<const double> t) const {
  require_positive_through(lower_.pou_m().weights(t).first + 1);
  return 1.0 / std::exp(lower_.eval_F(t));
}

double MultiplicativeEnvelope::eval_psi(std::span<const double> x) const {
  require_positive_through(lower_.pou_n().weights(x).first + 1);
  return 1.0 / std::exp(lower_.eval_G(x));
}

double MultiplicativeEnvelope::log_phi(std::span<const double> t) const {
  require_positive_through(lower_.pou_m().weights(t).first + 1);
  return -lower_.eval_F(t);
}

double MultiplicativeEnvelope::log_psi(std::span<const double> x) const {
  require_positive_through(lower_.pou_n().weights(x).first + 1);
  return -lower_.eval_G(x);
}

MultiplicativeEnvelope build_multiplicative(const Expr& f, const EnvelopeConfig& cfg, std::size_t precheck_shells) {
  EnvelopeConfig upper_cfg = cfg;
  upper_cfg.shells.require_positive = true;
  AdditiveEnvelope upper = build_additive(f, upper_cfg);
  upper.precompute(precheck_shells);

  const Expr reciprocal = parse("1 / (" + print(f) + ")", f.m(), f.n());
  AdditiveEnvelope lower = build_additive(reciprocal, cfg);
  lower.precompute(precheck_shells);
  return MultiplicativeEnvelope(std::move(upper), std::move(lower));
}

CompactFactorBound::CompactFactorBound(Expr f, Side compact_side, Box box, MaxBackend backend)
    : f_(std::move(f)), side_(compact_side), box_(std::move(box)), backend_(backend) {
  if (side_ == Side::Product) throw std::invalid_argument("compact side must be M or N");
  const int want = side_ == Side::M ? f_.m() : f_.n();
  if (box_.size() != static_cast<std::size_t>(want))
    throw DimensionMismatch("compact-factor box does not match that factor's dimension");
}

double CompactFactorBound::operator()(std::span<const double> other) const {
  const int want = side_ == Side::M ? f_.n() : f_.m();
  if (other.size() != static_cast<std::size_t>(want)) throw DimensionMismatch("point does not match the free factor");
  std::vector<double> key(other.begin(), other.end());
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::vector<Interval> fixed;
  for (double v : other) fixed.emplace_back(v);
  const Box point_box(fixed);
  const Box full = side_ == Side::M ? Box::product(box_, point_box) : Box::product(point_box, box_);
  const double bound = certified_max(f_, full, backend_).upper;
  std::lock_guard lock(mutex_);
  cache_.emplace(std::move(key), bound);
  return bound;
}

std::unique_ptr<CompactFactorBound> compact_factor_bound(const Expr& f, Side compact_side, const Box& box,
                                                         const MaxBackend& backend) {
  return std::make_unique<CompactFactorBound>(f, compact_side, box, backend);
}

}  // namespace sepenv
