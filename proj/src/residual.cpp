#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kolmofix/error.hpp"
#include "kolmofix/frozen.hpp"

namespace kolmofix {
namespace {

// Probabilists' Hermite polynomial He_k, k <= 4.
Jet hermite(const Jet& x, int k) {
  const int n = x.n;
  switch (k) {
    case 0:
      return Jet::constant(1.0, n);
    case 1:
      return x;
    case 2:
      return x * x - Jet::constant(1.0, n);
    case 3:
      return x * x * x - 3.0 * x;
    default: {
      const Jet x2 = x * x;
      return x2 * x2 - 6.0 * x2 + Jet::constant(3.0, n);
    }
  }
}

Jet bump(const Jet* x, int dim, double R) {
  Jet s = Jet::constant(0.0, dim);
  for (int i = 0; i < dim; ++i) s = s + x[i] * x[i];
  s = (1.0 / (R * R)) * s;
  if (s.v >= 1.0) return Jet::constant(0.0, dim);
  return exp(Jet::constant(1.0, dim) - reciprocal(Jet::constant(1.0, dim) - s));
}

Jet product(const Jet* x, int dim, const std::array<int, kMaxDim>& deg, double R) {
  Jet r = bump(x, dim, R);
  for (int i = 0; i < dim; ++i) {
    if (deg[static_cast<std::size_t>(i)] > 0) r = r * hermite(x[i], deg[static_cast<std::size_t>(i)]);
  }
  return r;
}

void multi_indices(int dim, int max_degree, int i, std::array<int, kMaxDim>& cur, int used,
                   std::vector<std::array<int, kMaxDim>>& out) {
  if (i == dim) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k + used <= max_degree; ++k) {
    cur[static_cast<std::size_t>(i)] = k;
    multi_indices(dim, max_degree, i + 1, cur, used + k, out);
  }
  cur[static_cast<std::size_t>(i)] = 0;
}

double sup_on_grid(int dim, double R, const std::array<int, kMaxDim>& deg) {
  const int per_axis = dim == 1 ? 2001 : dim == 2 ? 201 : dim == 3 ? 41 : 21;
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(per_axis);
  double best = 0.0;
  std::array<Jet, kMaxDim> x{};
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    for (int i = dim - 1; i >= 0; --i) {
      const double t = static_cast<double>(rest % static_cast<std::size_t>(per_axis)) / (per_axis - 1);
      x[static_cast<std::size_t>(i)] = Jet::constant(-R + 2.0 * R * t, dim);
      rest /= static_cast<std::size_t>(per_axis);
    }
    best = std::max(best, std::abs(product(x.data(), dim, deg, R).v));
  }
  return best;
}

std::string battery_name(int dim, const std::array<int, kMaxDim>& deg) {
  std::ostringstream os;
  bool any = false;
  for (int i = 0; i < dim; ++i) {
    const int k = deg[static_cast<std::size_t>(i)];
    if (k == 0) continue;
    if (any) os << "*";
    os << "He" << k << "(x" << i + 1 << ")";
    any = true;
  }
  if (!any) os << "1";
  os << "*bump";
  return os.str();
}

}  // namespace

std::vector<TestFunction> default_battery(int dim, double R, int max_degree) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("battery dimension out of range");
  if (!(R > 0.0)) throw ConfigError("battery radius must be positive");
  max_degree = std::clamp(max_degree, 0, 4);
  std::vector<std::array<int, kMaxDim>> idx;
  std::array<int, kMaxDim> cur{};
  multi_indices(dim, max_degree, 0, cur, 0, idx);
  std::vector<TestFunction> out;
  for (const auto& deg : idx) {
    const double sup = sup_on_grid(dim, R, deg);
    const double scale = sup > 0.0 ? 1.0 / sup : 1.0;
    out.push_back({battery_name(dim, deg), Function::native(battery_name(dim, deg), [deg, R, scale](const Jet* x, int d) {
                     return scale * product(x, d, deg, R);
                   })});
  }
  return out;
}

ResidualReport weak_residual(const DiscreteMeasure& mu, const FrozenCoefficients& coeffs,
                             const std::vector<TestFunction>& battery) {
  if (battery.empty()) throw ConfigError("weak residual needs a non-empty test battery");
  const int d = coeffs.dim();
  if (mu.dim() != d) throw MeasureError("measure and coefficients differ in dimension");
  std::vector<std::shared_ptr<const FrozenFunction>> frozen;
  frozen.reserve(battery.size());
  for (const TestFunction& t : battery) frozen.push_back(t.f.freeze(&mu));
  std::vector<std::vector<double>> terms(battery.size(), std::vector<double>(mu.size()));
  std::array<double, kMaxDim * kMaxDim> a{};
  std::array<double, kMaxDim> b{};
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double* x = mu.point(k);
    const double w = mu.weight(k);
    if (w == 0.0) {
      for (auto& t : terms) t[k] = 0.0;
      continue;
    }
    coeffs.at(x, a.data(), b.data());
    const double sc = coeffs.scale(x);
    const double src = coeffs.source(x);
    for (std::size_t f = 0; f < frozen.size(); ++f) {
      const Jet u = frozen[f]->jet(x, d);
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) s += a[static_cast<std::size_t>(i * d + j)] * u.hess(i, j);
        s += b[static_cast<std::size_t>(i)] * u.grad(i);
      }
      terms[f][k] = w * (sc * s + src);
    }
  }
  ResidualReport r;
  r.values.resize(battery.size());
  for (std::size_t f = 0; f < battery.size(); ++f) {
    r.values[f] = reduce_sum(terms[f]);
    if (f == 0 || std::abs(r.values[f]) > r.max_abs) {
      r.max_abs = std::abs(r.values[f]);
      r.worst = battery[f].name;
    }
  }
  return r;
}

}  // namespace kolmofix
