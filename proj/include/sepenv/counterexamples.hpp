// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sepenv/expr.hpp"

namespace sepenv {

/// Standard Gaussian density in the variable t.
Expr gaussian_density();

struct QuadratureConfig {
  double radius = 8.0;      // integrate over [-R, R]^2
  std::size_t panels = 400;  // panels per axis (>= 100)
  friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

/// f(t, x) = rho((t - x) / rho(x)) for a positive density rho. f is in L1
/// with integral equal to that of rho, yet no g(t) + h(x) with g, h in L1
/// dominates it: f = rho(0) on the diagonal.
class L1Demo {
 public:
  /// rho is an expression in t alone, parsed over (m, n) = (1, 0).
  explicit L1Demo(Expr rho = gaussian_density(), QuadratureConfig quadrature = {});

  const Expr& rho() const { return rho_; }
  /// f as an expression over (t1, x1).
  const Expr& f() const { return f_; }
  const QuadratureConfig& quadrature() const { return quad_; }

  double rho_at(double u) const;
  double f_at(double t, double x) const;

 private:
  Expr rho_;
  Expr f_;
  QuadratureConfig quad_;
};

struct L1Integral {
  double value = 0.0;
  std::size_t skipped = 0;  // outer nodes where rho underflowed to 0
  std::vector<std::string> warnings;
};

/// Composite Gauss-Legendre quadrature of f over [-R, R]^2. The inner (t)
/// panels are refined near the diagonal spike of width ~ rho(x).
L1Integral l1_integral(const L1Demo& demo);

struct ViolationSearch {
  double window = 20.0;         // x ranges over [-window, window]
  std::size_t x_steps = 20001;  // scan points in x
  std::size_t s_steps = 21;     // scan points across the band (odd: includes the diagonal)
  /// Band half-width in units of rho(x): points (x + sigma rho(x), x) with
  /// |sigma| <= band. Unset: the largest sigma with certified
  /// rho(u) >= rho(0) / 2 for |u| <= sigma.
  std::optional<double> band;
  double margin = 1e-9;
};

struct ViolationWitness {
  double t = 0.0;
  double x = 0.0;
  double f = 0.0;
  double gh = 0.0;  // g(t) + h(x)
  double excess = 0.0;
};

struct ViolationResult {
  std::optional<ViolationWitness> witness;
  std::size_t budget = 0;  // points scanned
  double band = 0.0;
};

/// Scans the diagonal band for f(t, x) > g(t) + h(x) + margin and returns
/// the point of largest excess (lowest scan index on ties). g and h are
/// expressions in t alone and must be certified nonnegative on the scanned
/// range. Not finding a violation proves nothing.
ViolationResult find_violation(const L1Demo& demo, const Expr& g, const Expr& h, const ViolationSearch& search = {});

/// The packaged integrable pair g = h = exp(-abs(t)).
Expr packaged_integrable_bound();

/// Bound oracle for F: receives a function tabulated on the scan grid.
using BoundOracle = std::function<double(const std::vector<double>& grid, const std::vector<double>& values)>;

/// An oracle that, like any continuous F in the compact-open topology
/// near a given function, only looks at a compact set: max over |y| <= 1
/// of the tabulated values, plus 1.
BoundOracle packaged_oracle();

struct EvalMapDemo {
  Expr G;  // expression in t alone
  BoundOracle oracle;
  double window = 10.0;  // y ranges over [-window, window]
  std::size_t resolution = 2001;
  double margin = 1e-9;
};

struct EvalMapWitness {
  int stage = 0;  // 1: phi0 = exp(G), 2: phi1 = |y|
  double y = 0.0;
  double lhs = 0.0;  // phi(y)
  double rhs = 0.0;  // oracle(phi) + G(y)
};

struct EvalMapReport {
  std::optional<EvalMapWitness> witness;
  double c0 = 0.0;
  std::optional<double> c1;  // absent if stage 1 already produced a witness
  std::size_t budget = 0;
};

/// Tries to refute phi(y) <= F(phi) + G(y) for the supplied F oracle with
/// the two test functions exp(G) and |y|. Scans y in ascending order.
EvalMapReport eval_map_falsify(const EvalMapDemo& demo);

struct EvalMapCase {
  std::string G;
  double window;
};

/// Ten candidate G (bounded and unbounded above), each tagged with a window
/// in which the packaged oracle is refuted.
const std::vector<EvalMapCase>& packaged_evalmap_family();

}  // namespace sepenv
