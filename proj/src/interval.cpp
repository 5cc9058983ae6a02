// SPDX-License-Identifier: Apache-2.0
#include "sepenv/interval.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>

namespace sepenv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMax = std::numeric_limits<double>::max();

// An overflowed lower bound +inf is replaced by DBL_MAX (and symmetrically),
// so lo < +inf and hi > -inf always hold and endpoint arithmetic never
// produces inf - inf.
Interval normalize(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi)) return Interval::entire();
  if (lo == kInf) lo = kMax;
  if (hi == -kInf) hi = -kMax;
  return {lo, hi};
}

// 0 * inf is 0 here: an infinite endpoint means "huge but finite".
double mul_endpoint(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

}  // namespace

double Interval::mid() const {
  if (std::isinf(lo) && std::isinf(hi)) return 0.0;
  if (std::isinf(lo)) return -kMax;
  if (std::isinf(hi)) return kMax;
  return 0.5 * lo + 0.5 * hi;
}

Interval operator+(const Interval& a, const Interval& b) {
  return normalize(rounding::down(a.lo + b.lo), rounding::up(a.hi + b.hi));
}

Interval operator-(const Interval& a, const Interval& b) {
  return normalize(rounding::down(a.lo - b.hi), rounding::up(a.hi - b.lo));
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  const double c[4] = {mul_endpoint(a.lo, b.lo), mul_endpoint(a.lo, b.hi), mul_endpoint(a.hi, b.lo),
                       mul_endpoint(a.hi, b.hi)};
  const auto [lo, hi] = std::minmax({c[0], c[1], c[2], c[3]});
  return normalize(rounding::down(lo), rounding::up(hi));
}

Interval operator/(const Interval& a, const Interval& b) {
  const double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
  for (double v : c)
    if (std::isnan(v)) return Interval::entire();
  const auto [lo, hi] = std::minmax({c[0], c[1], c[2], c[3]});
  return normalize(rounding::down(lo), rounding::up(hi));
}

Interval abs(const Interval& a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return -a;
  return {0.0, std::max(-a.lo, a.hi)};
}

Interval max(const Interval& a, const Interval& b) { return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)}; }
Interval min(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)}; }

Interval exp(const Interval& a) {
  return normalize(std::max(0.0, rounding::down(std::exp(a.lo), 2)), rounding::up(std::exp(a.hi), 2));
}

Interval log(const Interval& a) {
  return normalize(rounding::down(std::log(a.lo), 2), rounding::up(std::log(a.hi), 2));
}

Interval sqrt(const Interval& a) {
  return normalize(std::max(0.0, rounding::down(std::sqrt(a.lo))), rounding::up(std::sqrt(a.hi)));
}

namespace {

// Range of sin(x + shift) over a, where the maxima of the shifted function
// sit at pi/2 + 2k*pi. Critical points are located with a fuzzy test that
// may include a neighbouring extremum, never miss one.
Interval sinusoid(const Interval& a, double shift) {
  constexpr double pi = std::numbers::pi;
  if (!(std::isfinite(a.lo) && std::isfinite(a.hi)) || a.width() >= 2.0 * pi ||
      std::max(std::fabs(a.lo), std::fabs(a.hi)) > 1e8)
    return {-1.0, 1.0};

  auto value = [&](double x) { return shift == 0.0 ? std::sin(x) : std::cos(x); };
  double v0 = value(a.lo), v1 = value(a.hi);
  double lo = rounding::down(std::min(v0, v1), 2);
  double hi = rounding::up(std::max(v0, v1), 2);

  // Extrema of sin(x + shift) at x = pi/2 - shift + k*pi; even k is a maximum.
  constexpr double fuzz = 1e-7;
  const double first = (a.lo - (pi / 2 - shift)) / pi;
  const double last = (a.hi - (pi / 2 - shift)) / pi;
  for (double k = std::ceil(first - fuzz); k <= std::floor(last + fuzz); k += 1.0) {
    if (std::fmod(std::fabs(k), 2.0) == 0.0)
      hi = 1.0;
    else
      lo = -1.0;
  }
  return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

}  // namespace

Interval sin(const Interval& a) { return sinusoid(a, 0.0); }
Interval cos(const Interval& a) { return sinusoid(a, std::numbers::pi / 2); }

Interval pown(const Interval& a, int n) {
  if (n == 0) return {1.0, 1.0};
  const double p = static_cast<double>(n);
  if (a.hi < 0.0) {
    Interval r = pown(-a, n);
    return (n % 2 != 0) ? -r : r;
  }
  if (a.lo >= 0.0) {
    double l = std::pow(a.lo, p), h = std::pow(a.hi, p);
    if (n < 0) std::swap(l, h);
    return normalize(std::max(0.0, rounding::down(l, 2)), rounding::up(h, 2));
  }
  // Straddles zero; only reachable for n > 0.
  if (n % 2 == 0) {
    const double m = std::max(-a.lo, a.hi);
    return normalize(0.0, rounding::up(std::pow(m, p), 2));
  }
  return normalize(rounding::down(std::pow(a.lo, p), 2), rounding::up(std::pow(a.hi, p), 2));
}

Interval powr(const Interval& a, double p) {
  if (p == 0.0) return {1.0, 1.0};
  double l = std::pow(a.lo, p), h = std::pow(a.hi, p);
  if (p < 0.0) std::swap(l, h);
  return normalize(std::max(0.0, rounding::down(l, 2)), rounding::up(h, 2));
}

std::size_t Box::widest() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dims.size(); ++i)
    if (dims[i].width() > dims[best].width()) best = i;
  return best;
}

double Box::max_width() const {
  double w = 0.0;
  for (const auto& d : dims) w = std::max(w, d.width());
  return w;
}

std::vector<double> Box::midpoint() const {
  std::vector<double> m(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) m[i] = dims[i].mid();
  return m;
}

bool Box::contains(const std::vector<double>& p) const {
  if (p.size() != dims.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!dims[i].contains(p[i])) return false;
  return true;
}

Box Box::product(const Box& a, const Box& b) {
  std::vector<Interval> d = a.dims;
  d.insert(d.end(), b.dims.begin(), b.dims.end());
  return Box(std::move(d), Side::Product);
}

std::string to_string(const Interval& x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", x.lo, x.hi);
  return buf;
}

std::string to_string(const Box& b) {
  std::string s;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) s += " x ";
    s += to_string(b[i]);
  }
  return s;
}

}  // namespace sepenv
