// SPDX-License-Identifier: Apache-2.0
#include "sepenv/counterexamples.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sepenv/batch.hpp"

namespace sepenv {
namespace {

constexpr int kNodes = 8;

struct GaussLegendre {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
};

// Nodes and weights on [-1, 1] by Newton iteration on P_8.
const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule = [] {
    GaussLegendre r;
    for (int i = 0; i < kNodes; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (kNodes + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= kNodes; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kNodes * (z * p1 - p0) / (z * z - 1.0);
        const double step = p1 / dp;
        z -= step;
        if (std::fabs(step) < 1e-16) break;
      }
      r.x[i] = z;
      r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
  }();
  return rule;
}

double eval1(const Expr& e, double u) {
  const double p[1] = {u};
  return eval_point(e, std::span<const double>(p, 1));
}

// Inner panels over [a, b] in t, bisected while wider than half the larger
// of the spike width rho(x) and the panel's distance from x.
void inner_nodes(double a, double b, double x, double rho_x, int depth, std::vector<double>& ts,
                 std::vector<double>& ws) {
  const double dist = x < a ? a - x : (x > b ? x - b : 0.0);
  if (b - a > 0.5 * std::max(rho_x, dist) && depth < 64) {
    const double mid = 0.5 * (a + b);
    inner_nodes(a, mid, x, rho_x, depth + 1, ts, ws);
    inner_nodes(mid, b, x, rho_x, depth + 1, ts, ws);
    return;
  }
  const auto& gl = gauss_legendre();
  const double half = 0.5 * (b - a), centre = 0.5 * (a + b);
  for (int k = 0; k < kNodes; ++k) {
    ts.push_back(centre + half * gl.x[k]);
    ws.push_back(half * gl.w[k]);
  }
}

void require_nonnegative(const Expr& e, double lo, double hi, const char* name) {
  const Interval r = eval_interval(e, Box({{lo, hi}}, Side::M));
  if (!(r.lo >= 0.0))
    throw std::invalid_argument(std::string(name) + " is not certified nonnegative on the scanned range");
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k)
    v[k] = count == 1 ? lo : (k + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(k) / (count - 1));
  return v;
}

}  // namespace

Expr gaussian_density() { return parse("exp(-t^2 / 2) / sqrt(2 * pi)", 1, 0); }

L1Demo::L1Demo(Expr rho, QuadratureConfig quadrature) : rho_(std::move(rho)), quad_(quadrature) {
  if (rho_.m() != 1 || rho_.n() != 0) throw DimensionMismatch("density must be an expression in t alone");
  if (!(quad_.radius > 0.0) || !std::isfinite(quad_.radius))
    throw std::invalid_argument("truncation radius must be positive");
  if (quad_.panels < 100) throw std::invalid_argument("quadrature needs at least 100 panels per axis");
  const Interval r = eval_interval(rho_, Box({{-quad_.radius, quad_.radius}}, Side::M));
  if (!(r.lo > 0.0)) throw std::invalid_argument("density is not certified positive on the truncated domain");

  const Expr x1 = Expr::variable(Side::N, 1, 1, 1);
  const Expr rho_x = substitute(rho_, Side::M, 1, x1, 1, 1);
  const Expr arg = parse("(t1 - x1) / (" + print(rho_x) + ")", 1, 1);
  f_ = substitute(rho_, Side::M, 1, arg, 1, 1);
}

double L1Demo::rho_at(double u) const { return eval1(rho_, u); }

double L1Demo::f_at(double t, double x) const {
  const double p[2] = {t, x};
  return eval_point(f_, std::span<const double>(p, 2));
}

L1Integral l1_integral(const L1Demo& demo) {
  const auto& q = demo.quadrature();
  const auto& gl = gauss_legendre();
  const double R = q.radius;
  const double h = 2.0 * R / static_cast<double>(q.panels);
  const Tape tape(demo.f());

  L1Integral out;
  std::vector<double> ts, ws, values;
  PointColumns pts(2, 0);
  for (std::size_t p = 0; p < q.panels; ++p) {
    const double a = -R + h * static_cast<double>(p);
    const double b = p + 1 == q.panels ? R : a + h;
    const double half = 0.5 * (b - a), centre = 0.5 * (a + b);
    for (int k = 0; k < kNodes; ++k) {
      const double x = centre + half * gl.x[k];
      const double rho_x = demo.rho_at(x);
      if (!(rho_x > 0.0)) {
        ++out.skipped;
        out.warnings.push_back("density underflows at x = " + std::to_string(x) + "; node skipped");
        continue;
      }
      ts.clear();
      ws.clear();
      for (std::size_t ip = 0; ip < q.panels; ++ip) {
        const double ia = -R + h * static_cast<double>(ip);
        const double ib = ip + 1 == q.panels ? R : ia + h;
        inner_nodes(ia, ib, x, rho_x, 0, ts, ws);
      }
      pts.cols[0] = ts;
      pts.cols[1].assign(ts.size(), x);
      values.resize(ts.size());
      tape.eval(pts, values);
      double inner = 0.0;
      for (std::size_t j = 0; j < ts.size(); ++j) inner += ws[j] * values[j];
      out.value += half * gl.w[k] * inner;
    }
  }
  return out;
}

ViolationResult find_violation(const L1Demo& demo, const Expr& g, const Expr& h, const ViolationSearch& search) {
  for (const Expr* e : {&g, &h})
    if (e->m() != 1 || e->n() != 0) throw DimensionMismatch("g and h must be expressions in t alone");
  if (!(search.window > 0.0)) throw std::invalid_argument("search window must be positive");
  if (search.x_steps < 1 || search.s_steps < 1) throw std::invalid_argument("scan needs at least one step per axis");

  ViolationResult res;
  if (search.band) {
    res.band = *search.band;
  } else {
    // Largest sigma with rho >= rho(0)/2 certified on [-sigma, sigma].
    const double half_peak = demo.rho_at(0.0) / 2.0;
    auto ok = [&](double s) { return eval_interval(demo.rho(), Box({{-s, s}}, Side::M)).lo >= half_peak; };
    double lo = 0.0, hi = 64.0;
    if (ok(hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
      }
    }
    res.band = lo;
  }

  const double W = search.window;
  const double rho_hi = eval_interval(demo.rho(), Box({{-W, W}}, Side::M)).hi;
  const double reach = res.band * rho_hi;
  require_nonnegative(g, -W - reach, W + reach, "g");
  require_nonnegative(h, -W, W, "h");

  const auto xs = linspace(-W, W, search.x_steps);
  const double denom = search.s_steps > 1 ? static_cast<double>(search.s_steps - 1) : 1.0;
  for (double x : xs) {
    const double rho_x = demo.rho_at(x);
    const double hx = eval1(h, x);
    for (std::size_t is = 0; is < search.s_steps; ++is) {
      ++res.budget;
      const double numer = 2.0 * static_cast<double>(is) - static_cast<double>(search.s_steps - 1);
      const double sigma = res.band * numer / denom;
      const double t = x + sigma * rho_x;
      const double fv = demo.f_at(t, x);
      const double gh = eval1(g, t) + hx;
      const double excess = fv - gh;
      if (excess > search.margin && (!res.witness || excess > res.witness->excess))
        res.witness = ViolationWitness{t, x, fv, gh, excess};
    }
  }
  return res;
}

Expr packaged_integrable_bound() { return parse("exp(-abs(t))", 1, 0); }

BoundOracle packaged_oracle() {
  return [](const std::vector<double>& grid, const std::vector<double>& values) {
    bool seen = false;
    double best = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (std::fabs(grid[k]) > 1.0) continue;
      best = seen ? std::max(best, values[k]) : values[k];
      seen = true;
    }
    if (!seen) throw std::runtime_error("oracle needs grid points in [-1, 1]");
    return best + 1.0;
  };
}

EvalMapReport eval_map_falsify(const EvalMapDemo& demo) {
  if (demo.G.m() != 1 || demo.G.n() != 0) throw DimensionMismatch("G must be an expression in t alone");
  if (!(demo.window > 0.0)) throw std::invalid_argument("search window must be nonempty");
  if (demo.resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  if (!demo.oracle) throw std::invalid_argument("missing bound oracle");

  const auto ys = linspace(-demo.window, demo.window, demo.resolution);
  std::vector<double> G(ys.size()), phi(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) G[k] = eval1(demo.G, ys[k]);

  auto call = [&](const std::vector<double>& values) {
    const double c = demo.oracle(ys, values);
    if (!std::isfinite(c)) throw std::runtime_error("oracle returned a non-finite bound");
    return c;
  };

  EvalMapReport rep;
  auto scan = [&](int stage, double c) {
    for (std::size_t k = 0; k < ys.size(); ++k) {
      ++rep.budget;
      const double rhs = c + G[k];
      if (phi[k] > rhs + demo.margin) {
        rep.witness = EvalMapWitness{stage, ys[k], phi[k], rhs};
        return true;
      }
    }
    return false;
  };

  for (std::size_t k = 0; k < ys.size(); ++k) phi[k] = std::exp(G[k]);
  rep.c0 = call(phi);
  if (scan(1, rep.c0)) return rep;

  for (std::size_t k = 0; k < ys.size(); ++k) phi[k] = std::fabs(ys[k]);
  rep.c1 = call(phi);
  scan(2, *rep.c1);
  return rep;
}

const std::vector<EvalMapCase>& packaged_evalmap_family() {
  static const std::vector<EvalMapCase> family{
      {"t", 4.0},          {"t^2", 3.0},           {"t^3", 3.0},      {"abs(t)", 4.0},   {"log(1 + abs(t))", 6.0},
      {"0", 4.0},          {"-t^2", 3.0},          {"-abs(t)", 4.0},  {"sin(t)", 6.0},   {"exp(-t^2)", 5.0},
  };
  return family;
}

}  // namespace sepenv
