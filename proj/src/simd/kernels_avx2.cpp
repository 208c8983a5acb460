// AVX2 variants. Compiled with -mavx2 only; the dispatcher calls into this
// file after checking the CPU.

#include <immintrin.h>

#include "kolmofix/simd/kernels.hpp"
#include "scalar_math.hpp"

namespace kolmofix::simd {
namespace {

namespace d = detail;

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

inline double lane_tree(__m256d acc) {
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  return (a[0] + a[1]) + (a[2] + a[3]);
}

template <class VTerm, class STerm>
double pairwise_avx2(std::size_t lo, std::size_t n, const VTerm& vterm, const STerm& sterm) {
  if (n <= d::kPairwiseBase) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, vterm(lo + i));
    double s = lane_tree(acc);
    for (; i < n; ++i) s += sterm(lo + i);
    return s;
  }
  const std::size_t half = (n / 8) * 4;
  return pairwise_avx2(lo, half, vterm, sterm) + pairwise_avx2(lo + half, n - half, vterm, sterm);
}

// Exact int -> double for 0 <= v < 2^52 held in 64-bit lanes.
inline __m256d small_int_to_double(__m256i v) {
  const __m256d magic = splat(4503599627370496.0);  // 2^52
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, _mm256_castpd_si256(magic))), magic);
}

inline __m256d exp_nonpositive(__m256d x) {
  const __m256d floor_v = splat(d::kExpUnderflow);
  const __m256d under = _mm256_cmp_pd(x, floor_v, _CMP_LT_OQ);
  const __m256d xs = _mm256_max_pd(x, floor_v);
  const __m256d k =
      _mm256_round_pd(_mm256_mul_pd(xs, splat(d::kLog2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r =
      _mm256_sub_pd(_mm256_sub_pd(xs, _mm256_mul_pd(k, splat(d::kLn2Hi))), _mm256_mul_pd(k, splat(d::kLn2Lo)));
  __m256d p = splat(d::kExpCoeff[13]);
  for (int i = 12; i >= 0; --i) {
    p = _mm256_add_pd(_mm256_mul_pd(p, r), splat(d::kExpCoeff[static_cast<std::size_t>(i)]));
  }
  const __m256d magic = splat(4503599627370496.0);
  __m256i biased = _mm256_castpd_si256(_mm256_add_pd(_mm256_add_pd(k, splat(1023.0)), magic));
  biased = _mm256_sub_epi64(biased, _mm256_castpd_si256(magic));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));
  return _mm256_andnot_pd(under, _mm256_mul_pd(p, scale));
}

inline __m256d log_positive(__m256d u) {
  const __m256i bits = _mm256_castpd_si256(u);
  __m256d e = _mm256_sub_pd(small_int_to_double(_mm256_srli_epi64(bits, 52)), splat(1023.0));
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                      _mm256_set1_epi64x(0x3FF0000000000000ll)));
  const __m256d big = _mm256_cmp_pd(m, splat(d::kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, splat(1.0)), big);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, splat(1.0)), _mm256_add_pd(m, splat(1.0)));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = splat(1.0 / 21.0);
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 19.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 17.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 15.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 13.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 11.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 9.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 7.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 5.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0 / 3.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, s2), splat(1.0));
  const __m256d tail = _mm256_add_pd(_mm256_mul_pd(e, splat(d::kLn2Lo)),
                                     _mm256_mul_pd(_mm256_mul_pd(splat(2.0), s), p));
  return _mm256_add_pd(_mm256_mul_pd(e, splat(d::kLn2Hi)), tail);
}

inline void sincos_turn(__m256d u, __m256d& sin_out, __m256d& cos_out) {
  const __m256d t = _mm256_mul_pd(u, splat(4.0));
  __m256d q = _mm256_floor_pd(t);
  __m256d f = _mm256_sub_pd(t, q);
  const __m256d upper = _mm256_cmp_pd(f, splat(0.5), _CMP_GE_OQ);
  f = _mm256_blendv_pd(f, _mm256_sub_pd(f, splat(1.0)), upper);
  q = _mm256_blendv_pd(q, _mm256_add_pd(q, splat(1.0)), upper);
  const __m256d wrap = _mm256_cmp_pd(q, splat(4.0), _CMP_GE_OQ);
  q = _mm256_blendv_pd(q, _mm256_sub_pd(q, splat(4.0)), wrap);
  const __m256d a = _mm256_mul_pd(f, splat(d::kHalfPi));
  const __m256d a2 = _mm256_mul_pd(a, a);
  __m256d sp = splat(d::kSinCoeff[8]);
  for (int k = 7; k >= 0; --k) {
    sp = _mm256_add_pd(_mm256_mul_pd(sp, a2), splat(d::kSinCoeff[static_cast<std::size_t>(k)]));
  }
  __m256d cp = splat(d::kCosCoeff[9]);
  for (int k = 8; k >= 0; --k) {
    cp = _mm256_add_pd(_mm256_mul_pd(cp, a2), splat(d::kCosCoeff[static_cast<std::size_t>(k)]));
  }
  const __m256d sign = splat(-0.0);
  const __m256d sn = _mm256_mul_pd(a, sp);
  const __m256d cs = cp;
  const __m256d neg_sn = _mm256_xor_pd(sn, sign);
  const __m256d neg_cs = _mm256_xor_pd(cs, sign);
  const __m256d q1 = _mm256_cmp_pd(q, splat(1.0), _CMP_EQ_OQ);
  const __m256d q2 = _mm256_cmp_pd(q, splat(2.0), _CMP_EQ_OQ);
  const __m256d q3 = _mm256_cmp_pd(q, splat(3.0), _CMP_EQ_OQ);
  __m256d s = sn;
  s = _mm256_blendv_pd(s, cs, q1);
  s = _mm256_blendv_pd(s, neg_sn, q2);
  s = _mm256_blendv_pd(s, neg_cs, q3);
  __m256d c = cs;
  c = _mm256_blendv_pd(c, neg_sn, q1);
  c = _mm256_blendv_pd(c, neg_cs, q2);
  c = _mm256_blendv_pd(c, sn, q3);
  sin_out = s;
  cos_out = c;
}

inline void mulhilo(__m256i a, __m256i m, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(a, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

inline __m256d unit52(__m256i bits) {
  const __m256i mant = _mm256_or_si256(_mm256_srli_epi64(bits, 12), _mm256_set1_epi64x(0x3FF0000000000000ll));
  return _mm256_sub_pd(_mm256_castsi256_pd(mant), splat(1.0));
}

inline void box_muller(__m256i hi_lo_u1, __m256i hi_lo_u2, double* z0, double* z1) {
  const __m256d u1 = _mm256_sub_pd(splat(1.0), unit52(hi_lo_u1));
  const __m256d u2 = unit52(hi_lo_u2);
  const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(splat(-2.0), log_positive(u1)));
  __m256d s;
  __m256d c;
  sincos_turn(u2, s, c);
  _mm256_storeu_pd(z0, _mm256_mul_pd(r, c));
  _mm256_storeu_pd(z1, _mm256_mul_pd(r, s));
}

void normal_pairs_avx2(std::uint64_t seed, std::uint64_t step, std::uint32_t stream,
                       std::uint32_t first, std::size_t count, double* z0, double* z1) {
  const auto step_lo = static_cast<std::uint32_t>(step);
  const auto step_hi = static_cast<std::uint32_t>(step >> 32);
  const auto key0 = static_cast<std::uint32_t>(seed);
  const auto key1 = static_cast<std::uint32_t>(seed >> 32);
  const __m256i lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(d::kPhiloxM0));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(d::kPhiloxM1));

  std::size_t j = 0;
  for (; j + 8 <= count; j += 8) {
    __m256i c0 = _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(first + static_cast<std::uint32_t>(j))), lane);
    __m256i c1 = _mm256_set1_epi32(static_cast<int>(stream));
    __m256i c2 = _mm256_set1_epi32(static_cast<int>(step_lo));
    __m256i c3 = _mm256_set1_epi32(static_cast<int>(step_hi));
    std::uint32_t k0 = key0;
    std::uint32_t k1 = key1;
    for (int round = 0; round < 10; ++round) {
      __m256i hi0, lo0, hi1, lo1;
      mulhilo(c0, m0, hi0, lo0);
      mulhilo(c2, m1, hi1, lo1);
      const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), _mm256_set1_epi32(static_cast<int>(k0)));
      const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), _mm256_set1_epi32(static_cast<int>(k1)));
      c0 = n0;
      c1 = lo1;
      c2 = n2;
      c3 = lo0;
      k0 += d::kPhiloxW0;
      k1 += d::kPhiloxW1;
    }
    // (o0 << 32) | o1 and (o2 << 32) | o3 per particle, in particle order.
    const __m256i a_lo = _mm256_unpacklo_epi32(c1, c0);
    const __m256i a_hi = _mm256_unpackhi_epi32(c1, c0);
    const __m256i b_lo = _mm256_unpacklo_epi32(c3, c2);
    const __m256i b_hi = _mm256_unpackhi_epi32(c3, c2);
    const __m256i u1_first = _mm256_permute2x128_si256(a_lo, a_hi, 0x20);
    const __m256i u1_second = _mm256_permute2x128_si256(a_lo, a_hi, 0x31);
    const __m256i u2_first = _mm256_permute2x128_si256(b_lo, b_hi, 0x20);
    const __m256i u2_second = _mm256_permute2x128_si256(b_lo, b_hi, 0x31);
    box_muller(u1_first, u2_first, z0 + j, z1 + j);
    box_muller(u1_second, u2_second, z0 + j + 4, z1 + j + 4);
  }
  for (; j < count; ++j) {
    d::normal_pair(seed, step, stream, first + static_cast<std::uint32_t>(j), z0[j], z1[j]);
  }
}

double sum_avx2(const double* x, std::size_t n) {
  return pairwise_avx2(
      0, n, [x](std::size_t i) { return _mm256_loadu_pd(x + i); }, [x](std::size_t i) { return x[i]; });
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  return pairwise_avx2(
      0, n, [x, y](std::size_t i) { return _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)); },
      [x, y](std::size_t i) { return x[i] * y[i]; });
}

void euler_step_avx2(double* x, const double* drift, const double* scale, const double* noise, double dt,
                     double sqrt_dt, std::size_t n) {
  const __m256d vdt = splat(dt);
  const __m256d vsdt = splat(sqrt_dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d inc = _mm256_add_pd(
        _mm256_mul_pd(_mm256_loadu_pd(drift + i), vdt),
        _mm256_mul_pd(_mm256_loadu_pd(scale + i), _mm256_mul_pd(vsdt, _mm256_loadu_pd(noise + i))));
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), inc));
  }
  for (; i < n; ++i) x[i] = x[i] + (drift[i] * dt + scale[i] * (sqrt_dt * noise[i]));
}

void gaussian_sum_avx2(const double* centers, const double* weights, std::size_t n, const double* at,
                       std::size_t m, double inv_bw, double* out) {
  const __m256d vinv = splat(inv_bw);
  const __m256d half = splat(-0.5);
  for (std::size_t j = 0; j < m; ++j) {
    const double a = at[j];
    const __m256d va = splat(a);
    out[j] = pairwise_avx2(
        0, n,
        [&](std::size_t i) {
          const __m256d t = _mm256_mul_pd(_mm256_sub_pd(va, _mm256_loadu_pd(centers + i)), vinv);
          const __m256d u = _mm256_mul_pd(t, t);
          return _mm256_mul_pd(_mm256_loadu_pd(weights + i), exp_nonpositive(_mm256_mul_pd(half, u)));
        },
        [&](std::size_t i) { return d::gaussian_term(a, centers[i], weights[i], inv_bw); });
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2,          &sum_avx2,        &dot_avx2,
                                 &normal_pairs_avx2, &euler_step_avx2, &gaussian_sum_avx2};
  return table;
}

}  // namespace kolmofix::simd
