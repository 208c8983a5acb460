#pragma once

// Scalar reference pieces shared by every kernel variant. The AVX2 kernels
// replicate these operation for operation and fall back to them for tails.

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace kolmofix::simd::detail {

inline constexpr std::size_t kPairwiseBase = 64;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kSqrt2 = 1.41421356237309514547e+00;
inline constexpr double kHalfPi = 1.57079632679489655800e+00;
inline constexpr double kExpUnderflow = -708.0;

using Counter = std::array<std::uint32_t, 4>;

inline Counter philox4x32_10(Counter c, std::uint32_t k0, std::uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return c;
}

/// Top 52 bits of `bits` as a double in [0, 1).
inline double unit52(std::uint64_t bits) {
  return std::bit_cast<double>(0x3FF0000000000000ull | (bits >> 12)) - 1.0;
}

/// Natural log for positive normal arguments.
inline double log_positive(double u) {
  const auto bits = std::bit_cast<std::uint64_t>(u);
  double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52)) - 1023.0;
  double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
  if (m > kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double p = 1.0 / 21.0;
  p = p * s2 + 1.0 / 19.0;
  p = p * s2 + 1.0 / 17.0;
  p = p * s2 + 1.0 / 15.0;
  p = p * s2 + 1.0 / 13.0;
  p = p * s2 + 1.0 / 11.0;
  p = p * s2 + 1.0 / 9.0;
  p = p * s2 + 1.0 / 7.0;
  p = p * s2 + 1.0 / 5.0;
  p = p * s2 + 1.0 / 3.0;
  p = p * s2 + 1.0;
  return e * kLn2Hi + (e * kLn2Lo + 2.0 * s * p);
}

/// Taylor coefficients for sin/cos on |a| <= pi/4.
inline constexpr std::array<double, 9> kSinCoeff = {
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0,
};
inline constexpr std::array<double, 10> kCosCoeff = {
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
    -1.0 / 6402373705728000.0,
};

/// sin and cos of 2*pi*u for u in [0, 1).
inline void sincos_turn(double u, double& sin_out, double& cos_out) {
  const double t = u * 4.0;
  double q = std::floor(t);
  double f = t - q;
  if (f >= 0.5) {
    f = f - 1.0;
    q = q + 1.0;
  }
  if (q >= 4.0) q = q - 4.0;
  const double a = f * kHalfPi;
  const double a2 = a * a;
  double sp = kSinCoeff[8];
  for (int k = 7; k >= 0; --k) sp = sp * a2 + kSinCoeff[static_cast<std::size_t>(k)];
  double cp = kCosCoeff[9];
  for (int k = 8; k >= 0; --k) cp = cp * a2 + kCosCoeff[static_cast<std::size_t>(k)];
  const double sn = a * sp;
  const double cs = cp;
  if (q == 0.0) {
    sin_out = sn;
    cos_out = cs;
  } else if (q == 1.0) {
    sin_out = cs;
    cos_out = -sn;
  } else if (q == 2.0) {
    sin_out = -sn;
    cos_out = -cs;
  } else {
    sin_out = -cs;
    cos_out = sn;
  }
}

inline void normal_pair(std::uint64_t seed, std::uint64_t step, std::uint32_t stream,
                        std::uint32_t particle, double& z0, double& z1) {
  const Counter out = philox4x32_10(
      {particle, stream, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)},
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32));
  const double u1 = 1.0 - unit52((std::uint64_t{out[0]} << 32) | out[1]);
  const double u2 = unit52((std::uint64_t{out[2]} << 32) | out[3]);
  const double r = std::sqrt(-2.0 * log_positive(u1));
  double s = 0.0;
  double c = 0.0;
  sincos_turn(u2, s, c);
  z0 = r * c;
  z1 = r * s;
}

inline constexpr std::array<double, 14> kExpCoeff = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

/// exp(x) for x <= 0; flushes to zero below -708.
inline double exp_nonpositive(double x) {
  if (x < kExpUnderflow) return 0.0;
  const double k = std::nearbyint(x * kLog2e);
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;
  double p = kExpCoeff[13];
  for (int i = 12; i >= 0; --i) p = p * r + kExpCoeff[static_cast<std::size_t>(i)];
  const auto biased = static_cast<std::uint64_t>(static_cast<std::int64_t>(k + 1023.0));
  return p * std::bit_cast<double>(biased << 52);
}

inline double gaussian_term(double at, double center, double weight, double inv_bw) {
  const double t = (at - center) * inv_bw;
  const double u = t * t;
  return weight * exp_nonpositive(-0.5 * u);
}

/// Pairwise summation tree shared by all variants: blocks of at most
/// kPairwiseBase terms are summed in four interleaved lanes.
template <class Term>
double pairwise(std::size_t lo, std::size_t n, const Term& term) {
  if (n <= kPairwiseBase) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      acc[0] += term(lo + i);
      acc[1] += term(lo + i + 1);
      acc[2] += term(lo + i + 2);
      acc[3] += term(lo + i + 3);
    }
    double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (; i < n; ++i) s += term(lo + i);
    return s;
  }
  const std::size_t half = (n / 8) * 4;
  return pairwise(lo, half, term) + pairwise(lo + half, n - half, term);
}

}  // namespace kolmofix::simd::detail
