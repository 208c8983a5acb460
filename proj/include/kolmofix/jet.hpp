#pragma once

// Second-order forward-mode jets in up to kMaxDim variables.

#include <array>
#include <cmath>

namespace kolmofix {

inline constexpr int kMaxDim = 4;

struct Jet {
  int n = 0;
  double v = 0.0;
  std::array<double, kMaxDim> g{};
  std::array<double, kMaxDim * kMaxDim> h{};

  static Jet constant(double c, int n) {
    Jet r;
    r.n = n;
    r.v = c;
    return r;
  }
  static Jet variable(double x, int i, int n) {
    Jet r = constant(x, n);
    r.g[static_cast<std::size_t>(i)] = 1.0;
    return r;
  }
  double grad(int i) const { return g[static_cast<std::size_t>(i)]; }
  double hess(int i, int j) const { return h[static_cast<std::size_t>(i * kMaxDim + j)]; }
};

namespace jet_detail {

// f(u) with f' = d1 and f'' = d2 at u.v
inline Jet chain(const Jet& u, double f, double d1, double d2) {
  Jet r;
  r.n = u.n;
  r.v = f;
  for (int i = 0; i < u.n; ++i) r.g[i] = d1 * u.g[i];
  for (int i = 0; i < u.n; ++i) {
    for (int j = 0; j < u.n; ++j) {
      const int k = i * kMaxDim + j;
      r.h[k] = d1 * u.h[k] + d2 * u.g[i] * u.g[j];
    }
  }
  return r;
}

inline int width(const Jet& a, const Jet& b) { return a.n > b.n ? a.n : b.n; }

}  // namespace jet_detail

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.n = jet_detail::width(a, b);
  r.v = a.v + b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] + b.g[i];
  for (int k = 0; k < kMaxDim * kMaxDim; ++k) r.h[k] = a.h[k] + b.h[k];
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r = a;
  r.v = -a.v;
  for (auto& x : r.g) x = -x;
  for (auto& x : r.h) x = -x;
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.n = jet_detail::width(a, b);
  r.v = a.v - b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] - b.g[i];
  for (int k = 0; k < kMaxDim * kMaxDim; ++k) r.h[k] = a.h[k] - b.h[k];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.n = jet_detail::width(a, b);
  r.v = a.v * b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < r.n; ++i) {
    for (int j = 0; j < r.n; ++j) {
      const int k = i * kMaxDim + j;
      r.h[k] = a.h[k] * b.v + a.v * b.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    }
  }
  return r;
}

inline Jet operator*(double c, const Jet& a) {
  Jet r = a;
  r.v *= c;
  for (auto& x : r.g) x *= c;
  for (auto& x : r.h) x *= c;
  return r;
}

inline Jet reciprocal(const Jet& u) {
  const double inv = 1.0 / u.v;
  return jet_detail::chain(u, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet exp(const Jet& u) {
  const double e = std::exp(u.v);
  return jet_detail::chain(u, e, e, e);
}

inline Jet log(const Jet& u) { return jet_detail::chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v)); }

inline Jet sqrt(const Jet& u) {
  const double s = std::sqrt(u.v);
  return jet_detail::chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}

inline Jet sin(const Jet& u) {
  const double s = std::sin(u.v);
  return jet_detail::chain(u, s, std::cos(u.v), -s);
}

inline Jet cos(const Jet& u) {
  const double c = std::cos(u.v);
  return jet_detail::chain(u, c, -std::sin(u.v), -c);
}

inline Jet abs(const Jet& u) {
  const double s = u.v > 0.0 ? 1.0 : (u.v < 0.0 ? -1.0 : 0.0);
  return jet_detail::chain(u, std::abs(u.v), s, 0.0);
}

/// u^c for constant c.
inline Jet pow(const Jet& u, double c) {
  if (c == 0.0) return Jet::constant(1.0, u.n);
  if (c == 1.0) return u;
  const double d1 = c * std::pow(u.v, c - 1.0);
  const double d2 = c * (c - 1.0) * std::pow(u.v, c - 2.0);
  return jet_detail::chain(u, std::pow(u.v, c), d1, d2);
}

inline Jet pow(const Jet& u, const Jet& w) {
  bool constant_exponent = true;
  for (int i = 0; i < w.n; ++i) constant_exponent = constant_exponent && w.g[i] == 0.0;
  for (double x : w.h) constant_exponent = constant_exponent && x == 0.0;
  if (constant_exponent) return pow(u, w.v);
  return exp(w * log(u));
}

}  // namespace kolmofix
