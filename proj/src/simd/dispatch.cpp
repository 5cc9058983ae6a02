// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string_view>

#include "sepenv/simd/kernels.hpp"

namespace sepenv::simd {

#ifndef SEPENV_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {
// -1: automatic, otherwise a forced Isa value.
std::atomic<int> forced{-1};
}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool cpu_supports_avx2() {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

void force_isa(std::optional<Isa> isa) { forced.store(isa ? static_cast<int>(*isa) : -1); }

const KernelTable& active_kernels() {
  const int f = forced.load();
  if (f == static_cast<int>(Isa::Scalar)) return scalar_kernels();
  if (f < 0) {
    static const bool env_scalar = [] {
      const char* v = std::getenv("SEPENV_ISA");
      return v != nullptr && std::string_view(v) == "scalar";
    }();
    if (env_scalar) return scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels(); t != nullptr && cpu_supports_avx2()) return *t;
  return scalar_kernels();
}

}  // namespace sepenv::simd
