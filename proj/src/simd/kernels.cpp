#include "kolmofix/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace kolmofix::simd {

#if defined(KOLMOFIX_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(KOLMOFIX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("KOLMOFIX_ISA"); env != nullptr && *env != '\0') {
    const Isa wanted = parse_isa(env);
    if (wanted == Isa::scalar) return &scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return t;
    throw std::runtime_error("KOLMOFIX_ISA=avx2 requested but AVX2 kernels are unavailable");
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(KOLMOFIX_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_table();
#endif
  return nullptr;
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void select_isa(Isa isa) {
  if (isa == Isa::scalar) {
    active().store(&scalar_kernels(), std::memory_order_release);
    return;
  }
  const KernelTable* t = avx2_kernels();
  if (t == nullptr) throw std::runtime_error("AVX2 kernels are unavailable on this build or CPU");
  active().store(t, std::memory_order_release);
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw std::invalid_argument("unknown ISA '" + std::string(name) + "' (expected scalar or avx2)");
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace kolmofix::simd
