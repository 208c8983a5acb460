#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference and, where the
// build and CPU allow, an AVX2 variant chosen at runtime. Both variants use the
// same summation order and the same polynomial approximations, so they agree
// bit for bit; tests/test_simd.cpp holds them to that.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace kolmofix::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;

  /// Deterministic pairwise sum.
  double (*sum)(const double* x, std::size_t n);

  /// Pairwise sum of x[i] * y[i].
  double (*dot)(const double* x, const double* y, std::size_t n);

  /// Two standard normals per particle from a Philox4x32-10 counter
  /// (particle, stream, step) under key `seed`. Particle j of the call is
  /// `first + j`.
  void (*normal_pairs)(std::uint64_t seed, std::uint64_t step, std::uint32_t stream,
                       std::uint32_t first, std::size_t count, double* z0, double* z1);

  /// x[i] += drift[i] * dt + scale[i] * (sqrt_dt * noise[i])
  void (*euler_step)(double* x, const double* drift, const double* scale,
                     const double* noise, double dt, double sqrt_dt, std::size_t n);

  /// out[j] = sum_i weights[i] * exp(-0.5 * ((at[j] - centers[i]) * inv_bw)^2)
  void (*gaussian_sum)(const double* centers, const double* weights, std::size_t n,
                       const double* at, std::size_t m, double inv_bw, double* out);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// The active table. Defaults to the widest available ISA; the environment
/// variable KOLMOFIX_ISA=scalar|avx2 overrides the default on first use.
const KernelTable& kernels();

/// Throws std::runtime_error if the requested ISA is unavailable.
void select_isa(Isa isa);

Isa parse_isa(std::string_view name);
std::string_view isa_name(Isa isa);

}  // namespace kolmofix::simd
