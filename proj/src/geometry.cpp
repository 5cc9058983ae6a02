// SPDX-License-Identifier: Apache-2.0
#include "sepenv/geometry.hpp"

#include <cmath>
#include <string>

namespace sepenv {

double linf_norm(std::span<const double> p) {
  double r = 0.0;
  for (double v : p) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coordinate");
    r = std::max(r, std::fabs(v));
  }
  return r;
}

double l2_norm(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coordinate");
    s += v * v;
  }
  return std::sqrt(s);
}

Exhaustion::Exhaustion(int dim, Schedule schedule) : dim_(dim), schedule_(schedule) {
  if (dim < 0) throw std::invalid_argument("exhaustion dimension must be nonnegative");
  if (!(schedule.scale > 0.0) || !std::isfinite(schedule.scale))
    throw std::invalid_argument("schedule scale must be positive and finite");
  if (schedule.kind == Schedule::Kind::Geometric && !(schedule.ratio > 1.0))
    throw std::invalid_argument("geometric schedule ratio must exceed 1");
}

double Exhaustion::radius(std::size_t i) const {
  if (i == 0) return 0.0;
  const double k = static_cast<double>(i);
  if (schedule_.kind == Schedule::Kind::Linear) return schedule_.scale * k;
  return schedule_.scale * std::pow(schedule_.ratio, k);
}

std::size_t Exhaustion::shell_index_of_radius(double rho) const {
  if (!std::isfinite(rho)) throw std::invalid_argument("non-finite radius");
  rho = std::fabs(rho);
  double guess = 1.0;
  if (schedule_.kind == Schedule::Kind::Linear)
    guess = std::floor(rho / schedule_.scale) + 1.0;
  else if (rho > schedule_.scale)
    guess = std::floor(std::log(rho / schedule_.scale) / std::log(schedule_.ratio)) + 1.0;
  std::size_t i = static_cast<std::size_t>(std::max(1.0, guess));
  // The estimate can be off by one under rounding; settle against radius().
  while (radius(i) <= rho) ++i;
  while (i > 1 && radius(i - 1) > rho) --i;
  return i;
}

std::size_t Exhaustion::shell_index(std::span<const double> p) const {
  if (p.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("point dimension mismatch");
  return shell_index_of_radius(linf_norm(p));
}

std::optional<Box> Exhaustion::shell_box(std::size_t i) const {
  if (i == 0) return std::nullopt;
  const double r = radius(i);
  return Box(std::vector<Interval>(static_cast<std::size_t>(dim_), Interval{-r, r}), Side::M);
}

std::optional<Box> ProductExhaustion::product_box(std::size_t i) const {
  auto a = m_.shell_box(i);
  auto b = n_.shell_box(i);
  if (!a || !b) return std::nullopt;
  b->side = Side::N;
  return Box::product(*a, *b);
}

}  // namespace sepenv
