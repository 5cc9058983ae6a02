// SPDX-License-Identifier: Apache-2.0
#include "sepenv/shellmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "sepenv/batch.hpp"
#include "sepenv/rng.hpp"

namespace sepenv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ulp(double v) {
  v = std::fabs(v);
  if (!std::isfinite(v)) return kInf;
  return std::nextafter(v, kInf) - v;
}

struct Candidate {
  double hi;
  std::uint64_t seq;
  Box box;
};

// Max-heap on hi; earlier insertion wins ties so runs are deterministic.
struct ByUpper {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.hi != b.hi) return a.hi < b.hi;
    return a.seq > b.seq;
  }
};

MaxResult branch_and_bound(const Expr& e, const Box& box, const IntervalBackend& cfg) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("interval backend tolerance must be positive");
  MaxResult r;
  r.certified = true;

  const Interval root = eval_interval(e, box);
  double lower = eval_point(e, box.midpoint());
  double settled_hi = -kInf;  // boxes that can no longer be split

  std::priority_queue<Candidate, std::vector<Candidate>, ByUpper> open;
  std::uint64_t seq = 0;
  open.push({root.hi, seq++, box});

  double upper = root.hi;
  for (;;) {
    upper = std::max({open.empty() ? -kInf : open.top().hi, settled_hi, lower});
    const double gap = upper - lower;
    if (open.empty() || gap <= cfg.tol || gap <= 4.0 * ulp(upper)) break;
    if (r.subdivisions >= cfg.max_subdiv) {
      r.exhausted = true;
      break;
    }

    Candidate top = open.top();
    open.pop();
    const std::size_t axis = top.box.widest();
    const Interval span = top.box[axis];
    const double cut = span.mid();
    if (!(cut > span.lo && cut < span.hi)) {
      settled_hi = std::max(settled_hi, top.hi);
      continue;
    }
    ++r.subdivisions;
    for (int half = 0; half < 2; ++half) {
      Box child = top.box;
      child[axis] = half == 0 ? Interval{span.lo, cut} : Interval{cut, span.hi};
      // Both the child's own enclosure and the parent's bound its range.
      const double hi = std::min(eval_interval(e, child).hi, top.hi);
      // Midpoint plus the midpoint of the child's outer face on the split
      // axis, so maxima on the original box boundary are reached directly.
      std::vector<double> probe = child.midpoint();
      lower = std::max(lower, eval_point(e, probe));
      probe[axis] = half == 0 ? span.lo : span.hi;
      lower = std::max(lower, eval_point(e, probe));
      if (hi > lower) open.push({hi, seq++, std::move(child)});
    }
  }
  r.upper = upper;
  r.lower = lower;
  return r;
}

MaxResult sampled_lipschitz(const Expr& e, const Box& box, const LipschitzBackend& cfg) {
  if (cfg.grid < 2) throw std::invalid_argument("lipschitz backend grid must be >= 2 per axis");
  if (cfg.lipschitz && !(*cfg.lipschitz >= 0.0)) throw std::invalid_argument("lipschitz constant must be >= 0");
  const std::size_t dim = box.size();
  const Tape tape(e);
  const auto& kernels = simd::active_kernels();

  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= cfg.grid;

  auto node = [&](std::size_t k, std::size_t j) {
    const Interval& s = box[k];
    if (j + 1 == cfg.grid) return s.hi;
    return s.lo + (s.hi - s.lo) * static_cast<double>(j) / static_cast<double>(cfg.grid - 1);
  };

  constexpr std::size_t kBlock = 1 << 14;
  double best = -kInf;
  PointColumns pts(dim, 0);
  std::vector<double> values;
  for (std::size_t begin = 0; begin < total; begin += kBlock) {
    const std::size_t len = std::min(kBlock, total - begin);
    for (auto& col : pts.cols) col.resize(len);
    values.resize(len);
    for (std::size_t j = 0; j < len; ++j) {
      std::size_t flat = begin + j;
      for (std::size_t k = 0; k < dim; ++k) {
        pts.cols[k][j] = node(k, flat % cfg.grid);
        flat /= cfg.grid;
      }
    }
    tape.eval(pts, values, kernels);
    best = std::max(best, kernels.reduce_max(values.data(), len));
  }

  double half_cell = 0.0;
  for (std::size_t k = 0; k < dim; ++k)
    half_cell = std::max(half_cell, box[k].width() / static_cast<double>(cfg.grid - 1) / 2.0);

  MaxResult r;
  const double lip = cfg.lipschitz ? *cfg.lipschitz : estimate_lipschitz(e, box, cfg.estimate_samples);
  r.lower = best;
  r.upper = rounding::up(best + rounding::up(lip * half_cell), 2);
  r.certified = cfg.lipschitz.has_value();
  return r;
}

}  // namespace

Expr clamp_nonnegative(const Expr& e) {
  return pointwise_max({e, Expr::constant(0.0, e.m(), e.n())});
}

MaxResult certified_max(const Expr& e, const Box& box, const MaxBackend& backend) {
  if (box.size() != static_cast<std::size_t>(e.m() + e.n()))
    throw DimensionMismatch("box dimension does not match the expression");
  if (const auto* ib = std::get_if<IntervalBackend>(&backend)) return branch_and_bound(e, box, *ib);
  return sampled_lipschitz(e, box, std::get<LipschitzBackend>(backend));
}

double estimate_lipschitz(const Expr& e, const Box& box, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("lipschitz estimation needs at least 2 samples");
  const std::size_t dim = box.size();
  for (const auto& d : box.dims)
    if (!(d.width() > 0.0)) return 0.0;
  if (dim == 0) return 0.0;

  Rng rng(0x5eed0000ULL + samples);
  auto draw = [&] {
    std::vector<double> p(dim);
    for (std::size_t k = 0; k < dim; ++k) p[k] = rng.uniform(box[k].lo, box[k].hi);
    return p;
  };
  auto slope = [&](const std::vector<double>& p, const std::vector<double>& q) {
    double dist = 0.0;
    for (std::size_t k = 0; k < dim; ++k) dist = std::max(dist, std::fabs(p[k] - q[k]));
    if (dist == 0.0) return 0.0;
    return std::fabs(eval_point(e, p) - eval_point(e, q)) / dist;
  };

  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto p = draw();
    best = std::max(best, slope(p, draw()));
    // Short steps along each axis and along a random sign diagonal, which
    // is where the sup-norm slope of a linear function is attained.
    std::vector<double> diag = p;
    for (std::size_t k = 0; k < dim; ++k) {
      const double h = 1e-4 * box[k].width();
      std::vector<double> q = p;
      q[k] = p[k] + h <= box[k].hi ? p[k] + h : p[k] - h;
      best = std::max(best, slope(p, q));
      diag[k] = std::clamp(p[k] + (rng.coin(0.5) ? h : -h), box[k].lo, box[k].hi);
    }
    best = std::max(best, slope(p, diag));
  }
  return 2.0 * best;
}

ShellMaxima::ShellMaxima(Expr f, ProductExhaustion pex, MaxBackend backend, ShellOptions options)
    : f_(std::move(f)), clamped_(clamp_nonnegative(f_)), pex_(std::move(pex)), backend_(backend), options_(options) {
  if (pex_.m_side().dim() != f_.m() || pex_.n_side().dim() != f_.n())
    throw DimensionMismatch("exhaustion dimensions do not match the function");
}

ShellMaxima::ShellMaxima(ShellMaxima&& other) noexcept
    : f_(std::move(other.f_)),
      clamped_(std::move(other.clamped_)),
      pex_(std::move(other.pex_)),
      backend_(other.backend_),
      options_(other.options_),
      frozen_(other.frozen_) {
  std::lock_guard lock(other.mutex_);
  table_ = std::move(other.table_);
}

ShellMaxima ShellMaxima::from_table(Expr f, ProductExhaustion pex, std::vector<ShellEntry> table,
                                    MaxBackend backend) {
  ShellMaxima sm(std::move(f), std::move(pex), backend);
  for (std::size_t i = 0; i < table.size(); ++i) table[i].index = i + 1;
  sm.table_ = std::move(table);
  sm.frozen_ = true;
  return sm;
}

ShellEntry ShellMaxima::compute_raw(std::size_t i) const {
  if (options_.strict && i > options_.ceiling)
    throw StrictModeError(i, "past the strict-mode shell ceiling " + std::to_string(options_.ceiling));
  const Box box = *pex_.product_box(i);
  try {
    if (options_.require_positive) {
      const Interval range = eval_interval(f_, box);
      if (!(range.lo > 0.0))
        throw PositivityError(i, "function not certified positive (enclosure lower bound " + std::to_string(range.lo) + ")");
    }
    const MaxResult r = certified_max(clamped_, box, backend_);
    if (options_.strict && r.exhausted) throw StrictModeError(i, "subdivision budget exhausted");
    ShellEntry e;
    e.index = i;
    e.raw_upper = std::max(r.upper, 0.0);
    e.lower = r.lower;
    e.certified = r.certified;
    e.exhausted = r.exhausted;
    return e;
  } catch (const ShellError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ShellError(i, ex.what());
  }
}

void ShellMaxima::precompute(std::size_t i_max) const {
  std::size_t have;
  {
    std::lock_guard lock(mutex_);
    have = table_.size();
  }
  if (have >= i_max) return;
  if (frozen_) throw StrictModeError(have + 1, "shell beyond the stored table");

  // Backend work runs unlocked; the results are deterministic, so a racing
  // thread that appended first has stored exactly these values.
  std::vector<ShellEntry> fresh;
  for (std::size_t i = have + 1; i <= i_max; ++i) fresh.push_back(compute_raw(i));

  std::lock_guard lock(mutex_);
  for (auto& e : fresh) {
    if (e.index <= table_.size()) continue;
    const double prev = table_.empty() ? 0.0 : table_.back().value;
    e.value = std::max(prev, e.raw_upper);
    table_.push_back(e);
  }
}

double ShellMaxima::shell_max(std::size_t i) const { return entry(i).value; }

ShellEntry ShellMaxima::entry(std::size_t i) const {
  if (i == 0) return ShellEntry{0, 0.0, 0.0, 0.0, true, false};
  precompute(i);
  std::lock_guard lock(mutex_);
  return table_[i - 1];
}

std::vector<ShellEntry> ShellMaxima::table() const {
  std::lock_guard lock(mutex_);
  return table_;
}

}  // namespace sepenv
