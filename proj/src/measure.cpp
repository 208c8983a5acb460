#include "kolmofix/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kolmofix/error.hpp"
#include "kolmofix/function.hpp"
#include "kolmofix/simd/kernels.hpp"

namespace kolmofix {

double reduce_sum(const std::vector<double>& terms) { return simd::kernels().sum(terms.data(), terms.size()); }

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
  if (dim_ <= 0) throw MeasureError("measure dimension must be positive");
  if (coords_.size() != weights_.size() * static_cast<std::size_t>(dim_)) {
    throw MeasureError("measure has " + std::to_string(weights_.size()) + " weights but " +
                       std::to_string(coords_.size()) + " coordinates for dimension " + std::to_string(dim_));
  }
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] >= 0.0) || !std::isfinite(weights_[k])) {
      throw MeasureError("weight " + std::to_string(k) + " is negative or not finite");
    }
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw MeasureError("measure has a non-finite coordinate");
  }
  if (mass() > 1.0 + 1e-9) throw MeasureError("total mass " + std::to_string(mass()) + " exceeds 1");
}

DiscreteMeasure DiscreteMeasure::dirac(const std::vector<double>& point) {
  return DiscreteMeasure(static_cast<int>(point.size()), point, {1.0});
}

DiscreteMeasure DiscreteMeasure::uniform(int dim, std::vector<double> points) {
  const std::size_t n = points.size() / static_cast<std::size_t>(dim);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return DiscreteMeasure(dim, std::move(points), std::move(w));
}

double DiscreteMeasure::mass() const { return reduce_sum(weights_); }

void DiscreteMeasure::require_probability(double tol) const {
  const double m = mass();
  if (std::abs(m - 1.0) > tol) {
    std::ostringstream os;
    os << "expected a probability measure, total mass is " << m;
    throw MeasureError(os.str());
  }
}

GridDensity::GridDensity(std::vector<Axis> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  if (axes_.empty()) throw MeasureError("grid needs at least one axis");
  std::size_t n = 1;
  for (const Axis& a : axes_) {
    if (a.cells <= 0 || !(a.upper > a.lower)) throw MeasureError("grid axis must have cells > 0 and upper > lower");
    n *= static_cast<std::size_t>(a.cells);
  }
  if (values_.size() != n) throw MeasureError("grid value count does not match the axes");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw MeasureError("grid density has a negative or non-finite value");
  }
}

double GridDensity::cell_volume() const {
  double v = 1.0;
  for (const Axis& a : axes_) v *= a.width();
  return v;
}

double GridDensity::mass() const { return reduce_sum(values_) * cell_volume(); }

void GridDensity::require_probability(double tol) const {
  if (std::abs(mass() - 1.0) > tol) throw MeasureError("grid density does not have unit mass");
}

void GridDensity::center(std::size_t c, double* x) const {
  for (int i = dim() - 1; i >= 0; --i) {
    const Axis& a = axes_[static_cast<std::size_t>(i)];
    const auto cells = static_cast<std::size_t>(a.cells);
    x[i] = a.center(static_cast<int>(c % cells));
    c /= cells;
  }
}

DiscreteMeasure GridDensity::to_measure(bool drop_zero) const {
  const int d = dim();
  const double vol = cell_volume();
  std::vector<double> coords;
  std::vector<double> weights;
  coords.reserve(values_.size() * static_cast<std::size_t>(d));
  weights.reserve(values_.size());
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < values_.size(); ++c) {
    if (drop_zero && values_[c] == 0.0) continue;
    center(c, x.data());
    coords.insert(coords.end(), x.begin(), x.end());
    weights.push_back(values_[c] * vol);
  }
  return DiscreteMeasure(d, std::move(coords), std::move(weights));
}

double moment_term(const double* x, int dim, double p, MomentSpec spec) {
  if (p == 0.0) return 1.0;
  switch (spec.kind) {
    case MomentKind::abs: {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += std::pow(std::abs(x[i]), p);
      return s;
    }
    case MomentKind::radial: {
      double r2 = 0.0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      return std::pow(std::sqrt(r2), p);
    }
    case MomentKind::component:
      if (spec.component < 0 || spec.component >= dim) throw EvalError("moment component out of range");
      return std::pow(x[spec.component], p);
  }
  return 0.0;
}

double moment(const DiscreteMeasure& mu, double p, MomentSpec spec) {
  if (p < 0.0) throw EvalError("moment order must be nonnegative");
  if (spec.kind == MomentKind::component && p != std::floor(p)) {
    throw EvalError("component moments need an integer order");
  }
  std::vector<double> terms(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) terms[k] = mu.weight(k) * moment_term(mu.point(k), mu.dim(), p, spec);
  return reduce_sum(terms);
}

double moment(const GridDensity& mu, double p, MomentSpec spec) { return moment(mu.to_measure(), p, spec); }

double mean(const DiscreteMeasure& mu, int i) { return moment(mu, 1.0, {MomentKind::component, i}); }

double lyapunov_integral(const DiscreteMeasure& mu, const Function& V) {
  const auto frozen = V.freeze(&mu);
  std::vector<double> terms(mu.size());
  auto fail = [&](std::size_t k, const std::string& why) {
    std::ostringstream os;
    os << "V is not finite at atom " << k << ", x = (";
    for (int i = 0; i < mu.dim(); ++i) os << (i ? ", " : "") << mu.coord(k, i);
    os << "): " << why;
    throw EvalError(os.str());
  };
  for (std::size_t k = 0; k < mu.size(); ++k) {
    double v = 0.0;
    try {
      v = frozen->value(mu.point(k), mu.dim());
    } catch (const EvalError& e) {
      fail(k, e.what());
    }
    if (!std::isfinite(v)) fail(k, "non-finite value");
    terms[k] = mu.weight(k) * v;
  }
  return reduce_sum(terms);
}

bool in_PR(const DiscreteMeasure& mu, const Function& V, double R) { return lyapunov_integral(mu, V) <= R; }

namespace {

std::vector<std::size_t> sorted_order(const DiscreteMeasure& mu) {
  std::vector<std::size_t> idx(mu.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mu.coord(a, 0) < mu.coord(b, 0); });
  return idx;
}

DiscreteMeasure marginal(const DiscreteMeasure& mu, int i) {
  std::vector<double> c(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) c[k] = mu.coord(k, i);
  return DiscreteMeasure(1, std::move(c), mu.weights());
}

}  // namespace

double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  if (mu.dim() != 1 || nu.dim() != 1) {
    throw MeasureError("wasserstein_1d supports dimension 1 only; use measure_distance in higher dimensions");
  }
  if (p < 1.0) throw MeasureError("Wasserstein order must be at least 1");
  mu.require_probability(1e-9);
  nu.require_probability(1e-9);
  const double ma = mu.mass();
  const double mb = nu.mass();
  const auto ia = sorted_order(mu);
  const auto ib = sorted_order(nu);
  std::vector<double> terms;
  terms.reserve(mu.size() + nu.size());
  std::size_t a = 0;
  std::size_t b = 0;
  double ra = ia.empty() ? 0.0 : mu.weight(ia[0]) / ma;
  double rb = ib.empty() ? 0.0 : nu.weight(ib[0]) / mb;
  while (a < ia.size() && b < ib.size()) {
    const double step = std::min(ra, rb);
    const double gap = std::abs(mu.coord(ia[a], 0) - nu.coord(ib[b], 0));
    if (step > 0.0) terms.push_back(step * (p == 1.0 ? gap : std::pow(gap, p)));
    ra -= step;
    rb -= step;
    if (ra <= 0.0) {
      if (++a < ia.size()) ra = mu.weight(ia[a]) / ma;
    }
    if (rb <= 0.0) {
      if (++b < ib.size()) rb = nu.weight(ib[b]) / mb;
    }
  }
  const double cost = reduce_sum(terms);
  return p == 1.0 ? cost : std::pow(cost, 1.0 / p);
}

double measure_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Function* V) {
  if (mu.dim() != nu.dim()) throw MeasureError("measures live in different dimensions");
  double w = 0.0;
  for (int i = 0; i < mu.dim(); ++i) {
    w = std::max(w, mu.dim() == 1 ? wasserstein_1d(mu, nu, 1.0) : wasserstein_1d(marginal(mu, i), marginal(nu, i), 1.0));
  }
  if (V != nullptr && V->valid()) w += std::abs(lyapunov_integral(mu, *V) - lyapunov_integral(nu, *V));
  return w;
}

double v_weak_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const std::vector<Function>& battery) {
  if (battery.empty()) throw EvalError("v_weak_gap needs a non-empty test battery");
  double gap = 0.0;
  for (const Function& f : battery) gap = std::max(gap, std::abs(lyapunov_integral(mu, f) - lyapunov_integral(nu, f)));
  return gap;
}

namespace {

double psi(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double cutoff(int n, double radius) {
  const double inner = psi(n + 1.0 - radius);
  const double outer = psi(radius - n);
  return inner / (inner + outer);
}

double TruncationScheme::phi(const double* x, int dim) const {
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
  return cutoff(n, std::sqrt(r2));
}

DiscreteMeasure compensate_truncate(const DiscreteMeasure& mu, const TruncationScheme& scheme) {
  mu.require_probability(1e-9);
  const int d = mu.dim();
  std::vector<double> coords;
  std::vector<double> weights;
  std::vector<double> kept;
  coords.reserve(mu.coords().size() + static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double w = mu.weight(k) * scheme.phi(mu.point(k), d);
    kept.push_back(w);
    if (w == 0.0) continue;
    coords.insert(coords.end(), mu.point(k), mu.point(k) + d);
    weights.push_back(w);
  }
  if (scheme.compensate) {
    const double defect = 1.0 - reduce_sum(kept);
    if (defect > 0.0) {
      coords.insert(coords.end(), static_cast<std::size_t>(d), 0.0);
      weights.push_back(defect);
    }
  }
  return DiscreteMeasure(d, std::move(coords), std::move(weights));
}

double SmoothWindow::operator()(const double* z, int dim) const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) {
    const double l = lo[static_cast<std::size_t>(i)];
    const double h = hi[static_cast<std::size_t>(i)];
    double t = 0.0;
    if (z[i] < l) t = (l - z[i]) / ramp;
    if (z[i] > h) t = (z[i] - h) / ramp;
    if (t >= 1.0) return 0.0;
    if (t > 0.0) v *= psi(1.0 - t) / (psi(1.0 - t) + psi(t));
  }
  return v;
}

DiscreteMeasure project_y(const DiscreteMeasure& mu, const ProjectionWindow& window) {
  const int d = mu.dim();
  const int m = window.m;
  if (m < 1 || m >= d) throw MeasureError("projection needs 1 <= m < d");
  std::vector<double> coords;
  std::vector<double> weights;
  coords.reserve(mu.size() * static_cast<std::size_t>(m));
  weights.reserve(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double* x = mu.point(k);
    coords.insert(coords.end(), x, x + m);
    weights.push_back(mu.weight(k) * window.eta(x + m, d - m));
  }
  return DiscreteMeasure(m, std::move(coords), std::move(weights));
}

namespace {

double weighted_quantile(std::vector<std::pair<double, double>>& xw, double total, double q) {
  double cum = 0.0;
  for (const auto& [x, w] : xw) {
    cum += w;
    if (cum >= q * total) return x;
  }
  return xw.back().first;
}

}  // namespace

double silverman_bandwidth(const DiscreteMeasure& mu_y) {
  const double total = mu_y.mass();
  if (!(total > 0.0)) throw MeasureError("bandwidth of a zero measure");
  double sum_w2 = 0.0;
  for (double w : mu_y.weights()) sum_w2 += w * w;
  const double n_eff = total * total / sum_w2;
  const int m = mu_y.dim();
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<double, double>> xw(mu_y.size());
    double mean_i = 0.0;
    for (std::size_t k = 0; k < mu_y.size(); ++k) {
      xw[k] = {mu_y.coord(k, i), mu_y.weight(k)};
      mean_i += mu_y.weight(k) * mu_y.coord(k, i);
    }
    mean_i /= total;
    double var = 0.0;
    for (const auto& [x, w] : xw) var += w * (x - mean_i) * (x - mean_i);
    const double sd = std::sqrt(var / total);
    std::sort(xw.begin(), xw.end());
    const double iqr = weighted_quantile(xw, total, 0.75) - weighted_quantile(xw, total, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = std::max(sd, iqr / 1.34);
    const double h = 0.9 * spread * std::pow(n_eff, -1.0 / (m + 4.0));
    best = i == 0 ? h : std::min(best, h);
  }
  return best;
}

double kde_lr_norm(const DiscreteMeasure& mu_y, const std::vector<double>& ky_lower,
                   const std::vector<double>& ky_upper, double r, double bandwidth) {
  const int m = mu_y.dim();
  if (static_cast<int>(ky_lower.size()) != m || static_cast<int>(ky_upper.size()) != m) {
    throw MeasureError("K_y dimension does not match the projected measure");
  }
  if (!(r > 1.0)) throw MeasureError("L^r exponent must exceed 1");
  if (!(mu_y.mass() > 0.0)) throw MeasureError("kernel density of a measure with zero total weight");
  double h = bandwidth;
  if (!(h > 0.0)) {
    h = silverman_bandwidth(mu_y);
    if (!(h > 0.0)) h = 0.05 * (ky_upper[0] - ky_lower[0]);
  }
  const double norm_const = std::pow(h * std::sqrt(2.0 * M_PI), -m);

  if (m == 1) {
    const double lo = ky_lower[0];
    const double hi = ky_upper[0];
    const int cells = std::max(200, static_cast<int>(std::ceil((hi - lo) / (h / 4.0))));
    const double dx = (hi - lo) / cells;
    std::vector<double> at(static_cast<std::size_t>(cells));
    for (int j = 0; j < cells; ++j) at[static_cast<std::size_t>(j)] = lo + (j + 0.5) * dx;
    std::vector<double> centers;
    std::vector<double> weights;
    const double reach = 40.0 * h;
    for (std::size_t k = 0; k < mu_y.size(); ++k) {
      const double y = mu_y.coord(k, 0);
      if (mu_y.weight(k) > 0.0 && y > lo - reach && y < hi + reach) {
        centers.push_back(y);
        weights.push_back(mu_y.weight(k));
      }
    }
    std::vector<double> dens(at.size(), 0.0);
    simd::kernels().gaussian_sum(centers.data(), weights.data(), centers.size(), at.data(), at.size(), 1.0 / h,
                                 dens.data());
    for (double& v : dens) v = std::pow(v * norm_const, r) * dx;
    return std::pow(reduce_sum(dens), 1.0 / r);
  }

  // m >= 2: tensor midpoint grid, scalar path.
  std::vector<int> cells(static_cast<std::size_t>(m));
  std::vector<double> dx(static_cast<std::size_t>(m));
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) {
    const double len = ky_upper[static_cast<std::size_t>(i)] - ky_lower[static_cast<std::size_t>(i)];
    cells[static_cast<std::size_t>(i)] = std::max(64, static_cast<int>(std::ceil(len / (h / 4.0))));
    dx[static_cast<std::size_t>(i)] = len / cells[static_cast<std::size_t>(i)];
    total *= static_cast<std::size_t>(cells[static_cast<std::size_t>(i)]);
  }
  double vol = 1.0;
  for (double v : dx) vol *= v;
  std::vector<double> terms(total);
  std::vector<double> pt(static_cast<std::size_t>(m));
  std::vector<double> kern(mu_y.size());
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    for (int i = m - 1; i >= 0; --i) {
      const auto ci = static_cast<std::size_t>(cells[static_cast<std::size_t>(i)]);
      pt[static_cast<std::size_t>(i)] =
          ky_lower[static_cast<std::size_t>(i)] + (static_cast<double>(rest % ci) + 0.5) * dx[static_cast<std::size_t>(i)];
      rest /= ci;
    }
    for (std::size_t k = 0; k < mu_y.size(); ++k) {
      double q = 0.0;
      for (int i = 0; i < m; ++i) {
        const double t = (pt[static_cast<std::size_t>(i)] - mu_y.coord(k, i)) / h;
        q += t * t;
      }
      kern[k] = mu_y.weight(k) * std::exp(-0.5 * q);
    }
    terms[c] = std::pow(reduce_sum(kern) * norm_const, r) * vol;
  }
  return std::pow(reduce_sum(terms), 1.0 / r);
}

DiscreteMeasure merge_duplicates(const DiscreteMeasure& mu) {
  const int d = mu.dim();
  std::vector<std::size_t> idx(mu.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(mu.point(a), mu.point(a) + d, mu.point(b), mu.point(b) + d);
  };
  std::stable_sort(idx.begin(), idx.end(), less);
  std::vector<double> coords;
  std::vector<double> weights;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const std::size_t k = idx[t];
    if (!weights.empty() && std::equal(mu.point(k), mu.point(k) + d, coords.end() - d)) {
      weights.back() += mu.weight(k);
    } else {
      coords.insert(coords.end(), mu.point(k), mu.point(k) + d);
      weights.push_back(mu.weight(k));
    }
  }
  return DiscreteMeasure(d, std::move(coords), std::move(weights));
}

DiscreteMeasure mixture(const DiscreteMeasure& a, double wa, const DiscreteMeasure& b, double wb) {
  if (a.dim() != b.dim()) throw MeasureError("mixture of measures in different dimensions");
  std::vector<double> coords = a.coords();
  coords.insert(coords.end(), b.coords().begin(), b.coords().end());
  std::vector<double> weights;
  weights.reserve(a.size() + b.size());
  for (double w : a.weights()) weights.push_back(wa * w);
  for (double w : b.weights()) weights.push_back(wb * w);
  return merge_duplicates(drop_zero_weights(DiscreteMeasure(a.dim(), std::move(coords), std::move(weights))));
}

DiscreteMeasure drop_zero_weights(const DiscreteMeasure& mu) {
  const int d = mu.dim();
  std::vector<double> coords;
  std::vector<double> weights;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (mu.weight(k) == 0.0) continue;
    coords.insert(coords.end(), mu.point(k), mu.point(k) + d);
    weights.push_back(mu.weight(k));
  }
  return DiscreteMeasure(d, std::move(coords), std::move(weights));
}

DiscreteMeasure compress(const DiscreteMeasure& mu, std::size_t max_atoms) {
  if (mu.size() <= max_atoms || max_atoms == 0) return mu;
  const int d = mu.dim();
  const double total = mu.mass();
  std::vector<double> mass;
  std::vector<double> first;
  if (d == 1) {
    const auto idx = sorted_order(mu);
    mass.assign(max_atoms, 0.0);
    first.assign(max_atoms, 0.0);
    double cum = 0.0;
    for (std::size_t k : idx) {
      auto bin = static_cast<std::size_t>(cum / total * static_cast<double>(max_atoms));
      bin = std::min(bin, max_atoms - 1);
      mass[bin] += mu.weight(k);
      first[bin] += mu.weight(k) * mu.coord(k, 0);
      cum += mu.weight(k);
    }
    std::vector<double> coords;
    std::vector<double> weights;
    for (std::size_t b = 0; b < max_atoms; ++b) {
      if (mass[b] <= 0.0) continue;
      coords.push_back(first[b] / mass[b]);
      weights.push_back(mass[b]);
    }
    return DiscreteMeasure(1, std::move(coords), std::move(weights));
  }
  const auto per_dim =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(max_atoms), 1.0 / d))));
  std::vector<double> lo(static_cast<std::size_t>(d), 1e300);
  std::vector<double> hi(static_cast<std::size_t>(d), -1e300);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    for (int i = 0; i < d; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], mu.coord(k, i));
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], mu.coord(k, i));
    }
  }
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= per_dim;
  std::vector<double> sums(cells * static_cast<std::size_t>(d), 0.0);
  mass.assign(cells, 0.0);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    std::size_t c = 0;
    for (int i = 0; i < d; ++i) {
      const double span = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
      auto j = span > 0.0 ? static_cast<std::size_t>((mu.coord(k, i) - lo[static_cast<std::size_t>(i)]) / span *
                                                     static_cast<double>(per_dim))
                          : 0;
      j = std::min(j, per_dim - 1);
      c = c * per_dim + j;
    }
    mass[c] += mu.weight(k);
    for (int i = 0; i < d; ++i) sums[c * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] += mu.weight(k) * mu.coord(k, i);
  }
  std::vector<double> coords;
  std::vector<double> weights;
  for (std::size_t c = 0; c < cells; ++c) {
    if (mass[c] <= 0.0) continue;
    for (int i = 0; i < d; ++i) coords.push_back(sums[c * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] / mass[c]);
    weights.push_back(mass[c]);
  }
  return DiscreteMeasure(d, std::move(coords), std::move(weights));
}

DiscreteMeasure gaussian_sample(int dim, std::size_t n, double mean, double sd, std::uint64_t seed) {
  const std::size_t count = n * static_cast<std::size_t>(dim);
  const std::size_t pairs = (count + 1) / 2;
  std::vector<double> z0(pairs);
  std::vector<double> z1(pairs);
  simd::kernels().normal_pairs(seed, 0, 0, 0, pairs, z0.data(), z1.data());
  std::vector<double> coords(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double z = (j % 2 == 0) ? z0[j / 2] : z1[j / 2];
    coords[j] = mean + sd * z;
  }
  return DiscreteMeasure::uniform(dim, std::move(coords));
}

GridDensity gaussian_grid(const std::vector<Axis>& axes, double mean, double sd) {
  std::size_t n = 1;
  for (const Axis& a : axes) n *= static_cast<std::size_t>(a.cells);
  GridDensity shape(axes, std::vector<double>(n, 0.0));
  std::vector<double> values(n);
  std::vector<double> x(axes.size());
  for (std::size_t c = 0; c < n; ++c) {
    shape.center(c, x.data());
    double q = 0.0;
    for (double xi : x) q += (xi - mean) * (xi - mean);
    values[c] = std::exp(-0.5 * q / (sd * sd));
  }
  const double scale = 1.0 / (reduce_sum(values) * shape.cell_volume());
  for (double& v : values) v *= scale;
  return GridDensity(axes, std::move(values));
}

std::vector<double> histogram_1d(const DiscreteMeasure& mu, double lower, double upper, int bins) {
  if (mu.dim() != 1) throw MeasureError("histogram_1d needs a 1-D measure");
  std::vector<std::vector<double>> parts(static_cast<std::size_t>(bins));
  const double width = (upper - lower) / bins;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double x = mu.coord(k, 0);
    if (x < lower || x >= upper) continue;
    auto b = static_cast<std::size_t>((x - lower) / width);
    b = std::min(b, static_cast<std::size_t>(bins - 1));
    parts[b].push_back(mu.weight(k));
  }
  std::vector<double> out(static_cast<std::size_t>(bins));
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = reduce_sum(parts[b]);
  return out;
}

std::vector<double> histogram_1d(const GridDensity& g, double lower, double upper, int bins) {
  if (g.dim() != 1) throw MeasureError("histogram_1d needs a 1-D density");
  const Axis& ax = g.axes()[0];
  const double width = (upper - lower) / bins;
  const double h = ax.width();
  std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double lo = ax.lower + static_cast<double>(c) * h;
    const double hi = lo + h;
    const int first = std::max(0, static_cast<int>(std::floor((lo - lower) / width)));
    const int last = std::min(bins - 1, static_cast<int>(std::floor((hi - lower) / width)));
    for (int b = first; b <= last; ++b) {
      const double overlap = std::min(hi, lower + (b + 1) * width) - std::max(lo, lower + b * width);
      if (overlap > 0.0) out[static_cast<std::size_t>(b)] += g.values()[c] * overlap;
    }
  }
  return out;
}

}  // namespace kolmofix
