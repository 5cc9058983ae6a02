// SPDX-License-Identifier: Apache-2.0
// Built with -mavx2 only; reached solely through avx2_kernels() after a
// runtime CPU check.
#include <immintrin.h>

#include <cmath>
#include <limits>

#include "sepenv/simd/kernels.hpp"

namespace sepenv::simd {
namespace {

template <class Op, class Tail>
inline void binary_loop(const double* a, const double* b, double* out, std::size_t n, Op op, Tail tail) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = tail(a[i], b[i]);
}

template <class Op, class Tail>
inline void unary_loop(const double* a, double* out, std::size_t n, Op op, Tail tail) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i)));
  for (; i < n; ++i) out[i] = tail(a[i]);
}

template <int Cmp, class Tail>
inline bool any_loop(const double* a, std::size_t n, double rhs, Tail tail) {
  const __m256d r = _mm256_set1_pd(rhs);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    if (_mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(a + i), r, Cmp)) != 0) return true;
  for (; i < n; ++i)
    if (tail(a[i])) return true;
  return false;
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
              [](double x, double y) { return x + y; });
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
              [](double x, double y) { return x - y; });
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
              [](double x, double y) { return x * y; });
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); },
              [](double x, double y) { return x / y; });
}
// vmaxpd returns the second operand unless the first is strictly greater.
void vmax(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_max_pd(x, y); },
              [](double x, double y) { return x > y ? x : y; });
}
void vmin(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_min_pd(x, y); },
              [](double x, double y) { return x < y ? x : y; });
}
void neg(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  unary_loop(a, out, n, [&](__m256d x) { return _mm256_xor_pd(x, sign); }, [](double x) { return -x; });
}
void vabs(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  unary_loop(a, out, n, [&](__m256d x) { return _mm256_andnot_pd(sign, x); }, [](double x) { return std::fabs(x); });
}
void vsqrt(const double* a, double* out, std::size_t n) {
  unary_loop(a, out, n, [](__m256d x) { return _mm256_sqrt_pd(x); }, [](double x) { return std::sqrt(x); });
}
bool any_zero(const double* a, std::size_t n) {
  return any_loop<_CMP_EQ_OQ>(a, n, 0.0, [](double x) { return x == 0.0; });
}
bool any_negative(const double* a, std::size_t n) {
  return any_loop<_CMP_LT_OQ>(a, n, 0.0, [](double x) { return x < 0.0; });
}
bool any_nonpositive(const double* a, std::size_t n) {
  return any_loop<_CMP_NGT_UQ>(a, n, 0.0, [](double x) { return !(x > 0.0); });
}
double reduce_max(const double* a, std::size_t n) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  __m256d acc = _mm256_set1_pd(ninf);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(_mm256_loadu_pd(a + i), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double r = ninf;
  for (double v : lanes) r = v > r ? v : r;
  for (; i < n; ++i) r = a[i] > r ? a[i] : r;
  if (r == 0.0) r = 0.0;
  return r;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::Avx2, add,      sub,          mul,          div,
                                 vmax,      vmin,     neg,          vabs,         vsqrt,
                                 any_zero,  any_negative, any_nonpositive, reduce_max};
  return &table;
}

}  // namespace sepenv::simd
