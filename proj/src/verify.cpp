// SPDX-License-Identifier: Apache-2.0
#include "sepenv/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>

#include "sepenv/batch.hpp"
#include "sepenv/rng.hpp"

namespace sepenv {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void record(VerificationReport& rep, std::vector<double> point, double magnitude) {
  ++rep.violations;
  if (rep.worst_point.empty() || magnitude > rep.worst_magnitude) {
    rep.worst_point = std::move(point);
    rep.worst_magnitude = magnitude;
  }
}

// A point of one factor: uniform in [-R, R]^d, or (boundary draws) rescaled
// so its lifted radius lies in a transition band of a random shell.
std::vector<double> draw_factor(Rng& rng, const PartitionOfUnity& pou, std::size_t shells, bool boundary) {
  const Exhaustion& ex = pou.exhaustion();
  const double R = ex.radius(shells);
  std::vector<double> p(static_cast<std::size_t>(ex.dim()));
  for (auto& v : p) v = rng.uniform(-R, R);
  if (!boundary || p.empty()) return p;

  const std::size_t i = 1 + rng.index(shells);
  const double lo = ex.radius(i - 1), hi = ex.radius(i);
  const double band = pou.margin() * (hi - lo);
  // Either the support margin [r_i - delta*width, r_i) or the start of the
  // transition [r_{i-1}, r_{i-1} + delta*width].
  const double target = rng.coin(0.5) ? hi - band * rng.uniform() : lo + band * rng.uniform();
  double rho = pou.radius_of(p);
  if (rho == 0.0) {
    p[0] = 1.0;
    rho = pou.radius_of(p);
  }
  for (auto& v : p) v *= target / rho;
  return p;
}

struct Samples {
  std::vector<std::vector<double>> t, x;
  std::vector<double> f;
};

Samples draw_samples(const Expr& f, const PartitionOfUnity& pm, const PartitionOfUnity& pn, const SamplerConfig& cfg) {
  Rng rng(cfg.seed);
  Samples s;
  s.t.reserve(cfg.samples);
  s.x.reserve(cfg.samples);
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    const bool boundary = rng.coin(cfg.boundary_fraction);
    s.t.push_back(draw_factor(rng, pm, cfg.shells, boundary));
    s.x.push_back(draw_factor(rng, pn, cfg.shells, boundary));
  }
  const std::size_t m = static_cast<std::size_t>(f.m()), n = static_cast<std::size_t>(f.n());
  PointColumns cols(m + n, cfg.samples);
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    for (std::size_t d = 0; d < m; ++d) cols.cols[d][k] = s.t[k][d];
    for (std::size_t d = 0; d < n; ++d) cols.cols[m + d][k] = s.x[k][d];
  }
  s.f = Tape(f).eval(cols);
  return s;
}

std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> p = a;
  p.insert(p.end(), b.begin(), b.end());
  return p;
}

double ulp_of(double v) {
  v = std::fabs(v);
  return std::nextafter(v, std::numeric_limits<double>::infinity()) - v;
}

std::int64_t ordered_bits(double v) {
  const auto b = std::bit_cast<std::int64_t>(v);
  return b < 0 ? std::numeric_limits<std::int64_t>::min() - b : b;
}

double ulp_distance(double a, double b) {
  if (a == b) return 0.0;
  const __int128 d = static_cast<__int128>(ordered_bits(a)) - ordered_bits(b);
  return static_cast<double>(d < 0 ? -d : d);
}

double binomial(int k, int j) {
  double c = 1.0;
  for (int q = 1; q <= j; ++q) c = c * (k - j + q) / q;
  return c;
}

// order-th difference with signed step h (h < 0: backward) scaled by |h|^order.
double difference(const PartitionOfUnity& pou, std::size_t i, double at, double h, int order) {
  double sum = 0.0;
  for (int j = 0; j <= order; ++j) {
    const double sign = ((order - j) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binomial(order, j) * pou.cutoff(i, at + j * h);
  }
  // A backward difference of order k carries the sign (-1)^k.
  if (h < 0 && order % 2 == 1) sum = -sum;
  return sum / std::pow(std::fabs(h), order);
}

}  // namespace

int required_smoothness(const SmoothstepProfile& profile) {
  return profile.kind() == SmoothstepProfile::Kind::Polynomial ? profile.order() : 4;
}

SmoothnessResult smoothness_at(const PartitionOfUnity& pou, std::size_t i, bool at_end, int order) {
  if (i < 2) throw std::invalid_argument("smoothness is checked for shells >= 2 (shell 1 starts at radius 0)");
  if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
  const double a = pou.transition_start(i), b = pou.transition_end(i);
  const double at = at_end ? b : a;
  const double h = (b - a) / 100.0;

  SmoothnessResult r;
  auto jump = [&](double step) {
    return std::fabs(difference(pou, i, at, step, order) - difference(pou, i, at, -step, order));
  };
  r.jump_coarse = jump(h);
  r.jump_fine = jump(h / 4.0);
  for (int q = 0; q < 64; ++q) {
    const double c = a + (b - a - order * h) * q / 63.0;
    r.scale = std::max(r.scale, std::fabs(difference(pou, i, c, h, order)));
  }
  r.passed = r.jump_fine <= r.jump_coarse / 2.0 + 1e-4 * r.scale;
  return r;
}

VerificationReport check_domination(const AdditiveEnvelope& env, const Expr& f, const SamplerConfig& cfg) {
  const auto start = Clock::now();
  VerificationReport rep;
  rep.check = "domination";
  rep.seed = cfg.seed;
  rep.samples = cfg.samples;

  const Samples s = draw_samples(f, env.pou_m(), env.pou_n(), cfg);
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    const double bound = env.eval_F(s.t[k]) + env.eval_G(s.x[k]);
    const double allowed = cfg.ulp_slack ? bound + 4.0 * ulp_of(bound) : bound;
    min_slack = std::min(min_slack, bound - s.f[k]);
    if (s.f[k] > allowed) record(rep, concat(s.t[k], s.x[k]), s.f[k] - bound);
  }
  rep.stats["min_slack"] = min_slack;
  rep.stats["shells_computed"] = static_cast<double>(env.shells().table().size());
  rep.elapsed_seconds = seconds_since(start);
  return rep;
}

VerificationReport check_partition(const PartitionOfUnity& pou, const SamplerConfig& cfg) {
  const auto start = Clock::now();
  VerificationReport rep;
  rep.check = "partition";
  rep.seed = cfg.seed;
  rep.samples = cfg.samples;

  const Exhaustion& ex = pou.exhaustion();
  const std::size_t d = static_cast<std::size_t>(ex.dim());
  const double R = ex.radius(cfg.shells);
  Rng rng(cfg.seed);
  std::size_t sum_fail = 0, support_fail = 0, vanish_fail = 0;
  double max_sum_err = 0.0;
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    // A random direction scaled to a uniform radius in [0, R].
    std::vector<double> p(d);
    for (auto& v : p) v = rng.uniform(-1, 1);
    const double rho = rng.uniform(0, R);
    const double len = pou.radius_of(p);
    if (len > 0.0)
      for (auto& v : p) v *= rho / len;

    const std::size_t m = ex.shell_index(p);
    const double lifted = pou.radius_of(p);
    const std::size_t top = ex.shell_index_of_radius(lifted) + 2;
    double sum = 0.0;
    bool bad = false;
    for (std::size_t i = 1; i <= top; ++i) {
      const double v = pou.phi(i, p);
      sum += v;
      if (v < 0.0) bad = true;
      if (i < m && v != 0.0) {
        ++vanish_fail;
        bad = true;
      }
      if (v > 0.0 && !(lifted < ex.radius(i) - pou.margin() * (ex.radius(i) - ex.radius(i - 1)) / 2.0)) {
        ++support_fail;
        bad = true;
      }
    }
    const double err = std::fabs(sum - 1.0);
    max_sum_err = std::max(max_sum_err, err);
    if (err > 1e-12) {
      ++sum_fail;
      bad = true;
    }
    if (bad) record(rep, p, err);
  }

  std::size_t smooth_fail = 0, smooth_checked = 0;
  const int orders = required_smoothness(pou.profile());
  for (std::size_t i = 2; i <= 5; ++i)
    for (bool at_end : {false, true})
      for (int order = 1; order <= orders; ++order) {
        ++smooth_checked;
        if (!smoothness_at(pou, i, at_end, order).passed) ++smooth_fail;
      }
  rep.violations += smooth_fail;

  rep.stats["max_sum_error"] = max_sum_err;
  rep.stats["sum_failures"] = static_cast<double>(sum_fail);
  rep.stats["support_failures"] = static_cast<double>(support_fail);
  rep.stats["vanishing_failures"] = static_cast<double>(vanish_fail);
  rep.stats["smoothness_checks"] = static_cast<double>(smooth_checked);
  rep.stats["smoothness_failures"] = static_cast<double>(smooth_fail);
  rep.elapsed_seconds = seconds_since(start);
  return rep;
}

VerificationReport check_multiplicative(const MultiplicativeEnvelope& env, const Expr& f, const SamplerConfig& cfg) {
  const auto start = Clock::now();
  VerificationReport rep;
  rep.check = "multiplicative";
  rep.seed = cfg.seed;
  rep.samples = cfg.samples;

  const auto& up = env.upper_additive();
  const Samples s = draw_samples(f, up.pou_m(), up.pou_n(), cfg);
  std::size_t lower_fail = 0, upper_fail = 0, identity_fail = 0;
  double max_ulps = 0.0;
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    const auto& t = s.t[k];
    const auto& x = s.x[k];
    const double v = s.f[k];
    const double lower = env.eval_phi(t) * env.eval_psi(x);
    const double FG = env.eval_F(t) * env.eval_G(x);
    const double ref = static_cast<double>(std::exp(static_cast<long double>(env.log_F(t)) + env.log_G(x)));
    const double ulps = ulp_distance(FG, ref);
    max_ulps = std::max(max_ulps, ulps);
    if (lower > v) {
      ++lower_fail;
      record(rep, concat(t, x), lower - v);
    }
    if (v > FG) {
      ++upper_fail;
      record(rep, concat(t, x), v - FG);
    }
    if (ulps > 4.0) {
      ++identity_fail;
      record(rep, concat(t, x), 0.0);
    }
  }
  rep.stats["lower_failures"] = static_cast<double>(lower_fail);
  rep.stats["upper_failures"] = static_cast<double>(upper_fail);
  rep.stats["identity_failures"] = static_cast<double>(identity_fail);
  rep.stats["max_identity_ulps"] = max_ulps;
  rep.elapsed_seconds = seconds_since(start);
  return rep;
}

double dense_grid_max(const Expr& e, const Box& box, std::size_t per_axis) {
  if (per_axis < 2) throw std::invalid_argument("grid needs at least 2 nodes per axis");
  const std::size_t dim = box.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= per_axis;
  const Tape tape(e);
  constexpr std::size_t kBlock = 1 << 14;
  PointColumns pts(dim, 0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t begin = 0; begin < total; begin += kBlock) {
    const std::size_t len = std::min(kBlock, total - begin);
    for (auto& c : pts.cols) c.resize(len);
    for (std::size_t j = 0; j < len; ++j) {
      std::size_t flat = begin + j;
      for (std::size_t k = 0; k < dim; ++k) {
        const std::size_t q = flat % per_axis;
        flat /= per_axis;
        const Interval& s = box[k];
        pts.cols[k][j] = q + 1 == per_axis ? s.hi : s.lo + (s.hi - s.lo) * static_cast<double>(q) / (per_axis - 1);
      }
    }
    const auto vals = tape.eval(pts);
    best = std::max(best, *std::max_element(vals.begin(), vals.end()));
  }
  return best;
}

VerificationReport check_oracle_equivalence(const MaxBackend& backend, const std::vector<OracleCase>& corpus,
                                            std::size_t per_axis) {
  const auto start = Clock::now();
  VerificationReport rep;
  rep.check = "oracle_equivalence";
  rep.samples = corpus.size();
  double max_gap = 0.0;
  std::size_t exhausted = 0;
  for (const auto& c : corpus) {
    const MaxResult r = certified_max(c.e, c.box, backend);
    const double oracle = dense_grid_max(c.e, c.box, per_axis);
    if (r.upper < oracle) record(rep, c.box.midpoint(), oracle - r.upper);
    if (r.exhausted)
      ++exhausted;
    else
      max_gap = std::max(max_gap, r.upper - oracle);
  }
  rep.stats["max_gap_unexhausted"] = max_gap;
  rep.stats["exhausted"] = static_cast<double>(exhausted);
  rep.elapsed_seconds = seconds_since(start);
  return rep;
}

AdditiveEnvelope corrupt_shell(const AdditiveEnvelope& env, std::size_t shell, double factor, std::size_t through) {
  if (shell < 1 || shell > through) throw std::invalid_argument("corrupted shell must lie in 1..through");
  env.precompute(through);
  auto table = env.shells().table();
  table.resize(through);
  table[shell - 1].value *= factor;
  const ShellMaxima& sm = env.shells();
  auto frozen = std::make_shared<const ShellMaxima>(
      ShellMaxima::from_table(sm.function(), sm.exhaustion(), std::move(table), sm.backend()));
  return AdditiveEnvelope(std::move(frozen), env.pou_m(), env.pou_n());
}

}  // namespace sepenv
