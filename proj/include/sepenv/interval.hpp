// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace sepenv {

/// Closed interval [lo, hi]. Infinite endpoints stand for enclosures that
/// overflowed; the enclosed values themselves are always finite.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double v) : lo(v), hi(v) {}
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  static Interval entire() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }

  double width() const { return hi - lo; }
  double mid() const;
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

namespace rounding {

// Round-to-nearest results are widened by whole ulps; every enclosure is then
// sound for the correctly rounded IEEE ops (1 ulp) and for libm
// transcendentals (2 ulps, glibc documents < 1 ulp error for these).
inline double down(double v, int ulps = 1) {
  for (int k = 0; k < ulps && std::isfinite(v); ++k)
    v = std::nextafter(v, -std::numeric_limits<double>::infinity());
  return v;
}

inline double up(double v, int ulps = 1) {
  for (int k = 0; k < ulps && std::isfinite(v); ++k)
    v = std::nextafter(v, std::numeric_limits<double>::infinity());
  return v;
}

inline Interval widen(Interval x, int ulps = 1) { return {down(x.lo, ulps), up(x.hi, ulps)}; }

}  // namespace rounding

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
/// Caller guarantees 0 is not in b.
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);

Interval abs(const Interval& a);
Interval max(const Interval& a, const Interval& b);
Interval min(const Interval& a, const Interval& b);
Interval exp(const Interval& a);
/// Requires a.lo > 0.
Interval log(const Interval& a);
/// Requires a.lo >= 0.
Interval sqrt(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
/// Integer power; for negative n the caller guarantees 0 is not in a.
Interval pown(const Interval& a, int n);
/// Real power; requires a.lo >= 0 (a.lo > 0 for negative exponents).
Interval powr(const Interval& a, double p);

enum class Side { M, N, Product };

/// Axis-aligned box; per-coordinate intervals plus a tag for which factor
/// it lives on.
struct Box {
  std::vector<Interval> dims;
  Side side = Side::Product;

  Box() = default;
  Box(std::vector<Interval> d, Side s = Side::Product) : dims(std::move(d)), side(s) {}
  Box(std::initializer_list<Interval> d, Side s = Side::Product) : dims(d), side(s) {}

  std::size_t size() const { return dims.size(); }
  const Interval& operator[](std::size_t i) const { return dims[i]; }
  Interval& operator[](std::size_t i) { return dims[i]; }

  /// Index of the widest coordinate (lowest index on ties).
  std::size_t widest() const;
  double max_width() const;
  std::vector<double> midpoint() const;
  bool contains(const std::vector<double>& p) const;

  /// Cartesian product a x b, tagged Product.
  static Box product(const Box& a, const Box& b);

  friend bool operator==(const Box& a, const Box& b) { return a.dims == b.dims && a.side == b.side; }
};

std::string to_string(const Interval& x);
std::string to_string(const Box& b);

}  // namespace sepenv
