// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

#include "sepenv/interval.hpp"

namespace sepenv {

/// Radius schedule r_i = scale * i (linear) or scale * ratio^i (geometric).
struct Schedule {
  enum class Kind { Linear, Geometric };
  Kind kind = Kind::Linear;
  double scale = 1.0;
  double ratio = 2.0;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

double linf_norm(std::span<const double> p);
double l2_norm(std::span<const double> p);

/// Compact exhaustion of R^d by closed sup-norm balls K_i = [-r_i, r_i]^d
/// with K_0 empty. Radii are a pure function of the index.
class Exhaustion {
 public:
  Exhaustion(int dim, Schedule schedule = {});

  int dim() const { return dim_; }
  const Schedule& schedule() const { return schedule_; }

  /// r_i; r_0 = 0.
  double radius(std::size_t i) const;

  /// Least i >= 1 with |p|_inf < r_i, i.e. the first open ball U_i holding p.
  std::size_t shell_index(std::span<const double> p) const;
  /// Least i >= 1 with rho < r_i.
  std::size_t shell_index_of_radius(double rho) const;

  /// K_i as a box; std::nullopt is the empty set K_0.
  std::optional<Box> shell_box(std::size_t i) const;

 private:
  int dim_;
  Schedule schedule_;
};

/// Pair of exhaustions sharing one index set, so K_i x L_i is well defined.
class ProductExhaustion {
 public:
  ProductExhaustion(Exhaustion m, Exhaustion n) : m_(std::move(m)), n_(std::move(n)) {}

  const Exhaustion& m_side() const { return m_; }
  const Exhaustion& n_side() const { return n_; }

  std::optional<Box> product_box(std::size_t i) const;

 private:
  Exhaustion m_;
  Exhaustion n_;
};

}  // namespace sepenv
