// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

// Elementwise double kernels behind a function table. The scalar table is
// the reference; the AVX2 table (compiled in its own translation unit with
// -mavx2) must produce bitwise-identical results. Only correctly rounded
// IEEE operations live here; libm calls stay scalar in every variant.

namespace sepenv::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

using BinaryKernel = void (*)(const double* a, const double* b, double* out, std::size_t n);
using UnaryKernel = void (*)(const double* a, double* out, std::size_t n);
using PredicateKernel = bool (*)(const double* a, std::size_t n);
using ReduceKernel = double (*)(const double* a, std::size_t n);

struct KernelTable {
  Isa isa;
  BinaryKernel add;
  BinaryKernel sub;
  BinaryKernel mul;
  BinaryKernel div;
  BinaryKernel max;  // a > b ? a : b
  BinaryKernel min;  // a < b ? a : b
  UnaryKernel neg;
  UnaryKernel abs;
  UnaryKernel sqrt;
  PredicateKernel any_zero;         // v == 0
  PredicateKernel any_negative;     // v < 0
  PredicateKernel any_nonpositive;  // !(v > 0), NaN included
  ReduceKernel reduce_max;          // max value, zero returned as +0; -inf for n == 0
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

/// Best table for this CPU. SEPENV_ISA=scalar in the environment, or
/// force_isa(Isa::Scalar), pins the reference kernels.
const KernelTable& active_kernels();

void force_isa(std::optional<Isa> isa);

}  // namespace sepenv::simd
