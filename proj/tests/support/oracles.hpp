// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used to check the library. Nothing here
// calls the code under test beyond parse and eval_point.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sepenv/expr.hpp"
#include "sepenv/interval.hpp"

namespace sepenv::testing {

/// Max of eval_point over a tensor grid with `per_axis` nodes per axis,
/// endpoints included.
inline double grid_max(const Expr& e, const Box& box, std::size_t per_axis) {
  const std::size_t dim = box.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= per_axis;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> p(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t j = rest % per_axis;
      rest /= per_axis;
      const double u = static_cast<double>(j) / static_cast<double>(per_axis - 1);
      p[k] = box[k].lo + (box[k].hi - box[k].lo) * u;
    }
    best = std::max(best, eval_point(e, p));
  }
  return best;
}

/// Coefficients c_0..c_{2k+1} of the degree 2k+1 polynomial with p(0) = 0,
/// p(1) = 1 and derivatives 1..k zero at both ends, by Gaussian elimination
/// on the (2k+2) x (2k+2) Hermite system.
inline std::vector<double> hermite_step_coefficients(int k) {
  const int n = 2 * k + 2;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  auto falling = [](int p, int d) {
    double f = 1.0;
    for (int q = 0; q < d; ++q) f *= p - q;
    return f;
  };
  int row = 0;
  for (int d = 0; d <= k; ++d, ++row) a[row][d] = falling(d, d);  // derivative d at 0
  for (int d = 0; d <= k; ++d, ++row) {
    for (int p = d; p < n; ++p) a[row][p] = falling(p, d);  // derivative d at 1
    a[row][n] = d == 0 ? 1.0 : 0.0;
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int q = c; q <= n; ++q) a[r][q] -= f * a[c][q];
    }
  }
  std::vector<double> coef(n);
  for (int c = 0; c < n; ++c) coef[c] = a[c][n] / a[c][c];
  return coef;
}

inline double polyval(const std::vector<double>& coef, double u) {
  double s = 0.0;
  for (std::size_t j = coef.size(); j-- > 0;) s = s * u + coef[j];
  return s;
}

}  // namespace sepenv::testing
