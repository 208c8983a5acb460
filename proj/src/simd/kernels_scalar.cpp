#include "kolmofix/simd/kernels.hpp"
#include "scalar_math.hpp"

namespace kolmofix::simd {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  return detail::pairwise(0, n, [x](std::size_t i) { return x[i]; });
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  return detail::pairwise(0, n, [x, y](std::size_t i) { return x[i] * y[i]; });
}

void normal_pairs_scalar(std::uint64_t seed, std::uint64_t step, std::uint32_t stream,
                         std::uint32_t first, std::size_t count, double* z0, double* z1) {
  for (std::size_t j = 0; j < count; ++j) {
    detail::normal_pair(seed, step, stream, first + static_cast<std::uint32_t>(j), z0[j], z1[j]);
  }
}

void euler_step_scalar(double* x, const double* drift, const double* scale, const double* noise,
                       double dt, double sqrt_dt, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = x[i] + (drift[i] * dt + scale[i] * (sqrt_dt * noise[i]));
  }
}

void gaussian_sum_scalar(const double* centers, const double* weights, std::size_t n,
                         const double* at, std::size_t m, double inv_bw, double* out) {
  for (std::size_t j = 0; j < m; ++j) {
    const double a = at[j];
    out[j] = detail::pairwise(0, n, [&](std::size_t i) {
      return detail::gaussian_term(a, centers[i], weights[i], inv_bw);
    });
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar,          &sum_scalar,        &dot_scalar,
                                 &normal_pairs_scalar, &euler_step_scalar, &gaussian_sum_scalar};
  return table;
}

}  // namespace kolmofix::simd
