#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "kolmofix/simd/kernels.hpp"

using namespace kolmofix;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

std::vector<double> random_vec(std::size_t n, std::uint32_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar table is always present") {
  CHECK(simd::scalar_kernels().isa == simd::Isa::scalar);
  CHECK(simd::parse_isa("avx2") == simd::Isa::avx2);
  CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
}

TEST_CASE("avx2 kernels agree with scalar bit for bit") {
  const simd::KernelTable* v = simd::avx2_kernels();
  if (v == nullptr) {
    MESSAGE("AVX2 variant unavailable on this build or CPU; equivalence not exercised");
    return;
  }
  const simd::KernelTable& s = simd::scalar_kernels();

  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 255u, 1000u, 4097u}) {
    CAPTURE(n);
    const auto x = random_vec(n, 11 + static_cast<std::uint32_t>(n));
    const auto y = random_vec(n, 29 + static_cast<std::uint32_t>(n));
    CHECK(same_bits(s.sum(x.data(), n), v->sum(x.data(), n)));
    CHECK(same_bits(s.dot(x.data(), y.data(), n), v->dot(x.data(), y.data(), n)));

    std::vector<double> xs = x;
    std::vector<double> xv = x;
    const auto drift = random_vec(n, 5);
    const auto scale = random_vec(n, 6);
    const auto noise = random_vec(n, 7);
    s.euler_step(xs.data(), drift.data(), scale.data(), noise.data(), 1e-3, std::sqrt(1e-3), n);
    v->euler_step(xv.data(), drift.data(), scale.data(), noise.data(), 1e-3, std::sqrt(1e-3), n);
    CHECK(same_bits(xs, xv));
  }

  for (std::size_t count : {1u, 5u, 8u, 256u, 1001u}) {
    CAPTURE(count);
    std::vector<double> a0(count), a1(count), b0(count), b1(count);
    s.normal_pairs(42, 17, 1, 300, count, a0.data(), a1.data());
    v->normal_pairs(42, 17, 1, 300, count, b0.data(), b1.data());
    CHECK(same_bits(a0, b0));
    CHECK(same_bits(a1, b1));
  }

  const auto centers = random_vec(333, 3);
  const auto weights = random_vec(333, 4, 0.1);
  const auto at = random_vec(97, 8, 2.0);
  std::vector<double> gs(at.size()), gv(at.size());
  s.gaussian_sum(centers.data(), weights.data(), centers.size(), at.data(), at.size(), 3.7, gs.data());
  v->gaussian_sum(centers.data(), weights.data(), centers.size(), at.data(), at.size(), 3.7, gv.data());
  CHECK(same_bits(gs, gv));
}

TEST_CASE("normal_pairs are standard normal") {
  const std::size_t n = 200000;
  std::vector<double> z0(n), z1(n);
  simd::kernels().normal_pairs(7, 0, 0, 0, n, z0.data(), z1.data());
  double m = 0.0, v = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m += z0[i] + z1[i];
    v += z0[i] * z0[i] + z1[i] * z1[i];
    c += z0[i] * z1[i];
  }
  m /= 2.0 * n;
  v /= 2.0 * n;
  c /= static_cast<double>(n);
  CHECK(std::abs(m) < 0.01);
  CHECK(std::abs(v - 1.0) < 0.01);
  CHECK(std::abs(c) < 0.01);
}

TEST_CASE("normal_pairs depend only on the counter") {
  std::vector<double> a0(10), a1(10), b0(4), b1(4);
  simd::kernels().normal_pairs(3, 9, 0, 100, 10, a0.data(), a1.data());
  simd::kernels().normal_pairs(3, 9, 0, 104, 4, b0.data(), b1.data());
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(same_bits(a0[4 + i], b0[i]));
    CHECK(same_bits(a1[4 + i], b1[i]));
  }
}

}  // TEST_SUITE
