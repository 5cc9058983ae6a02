// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "sepenv/simd/kernels.hpp"

namespace sepenv::simd {
namespace {

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}
void vmax(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] > b[i] ? a[i] : b[i];
}
void vmin(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] < b[i] ? a[i] : b[i];
}
void neg(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}
void vabs(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i]);
}
void vsqrt(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(a[i]);
}
bool any_zero(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] == 0.0) return true;
  return false;
}
bool any_negative(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] < 0.0) return true;
  return false;
}
bool any_nonpositive(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!(a[i] > 0.0)) return true;
  return false;
}
// Ties between -0 and +0 resolve to +0 so that lane order cannot matter.
double reduce_max(const double* a, std::size_t n) {
  double acc = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) acc = a[i] > acc ? a[i] : acc;
  if (acc == 0.0) acc = 0.0;
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, add,      sub,          mul,          div,
                                 vmax,        vmin,     neg,          vabs,         vsqrt,
                                 any_zero,    any_negative, any_nonpositive, reduce_max};
  return table;
}

}  // namespace sepenv::simd
