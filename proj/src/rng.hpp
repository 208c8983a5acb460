#pragma once

#include <cstdint>
#include <random>

namespace kolmofix::detail {

/// Uniform doubles in [0, 1) with a portable bit-to-double mapping.
class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : gen_(seed) {}
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double in(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kolmofix::detail
