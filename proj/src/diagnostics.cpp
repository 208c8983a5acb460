#include "kolmofix/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kolmofix/error.hpp"
#include "rng.hpp"

namespace kolmofix {

double RegularityConfig::r_prime() const { return h2_exponent(window.m, gamma); }

double h2_exponent(int m, double gamma) {
  if (m <= 0) return std::numeric_limits<double>::infinity();
  if (m == 1) return 1.0 + gamma;
  return static_cast<double>(m);
}

RegularityReport projection_regularity(const DiscreteMeasure& mu, const RegularityConfig& cfg) {
  const ProjectionWindow& w = cfg.window;
  if (!(cfg.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(w.r > 1.0)) throw ConfigError("projection exponent r must exceed 1");
  RegularityReport rep;
  rep.m = w.m;
  rep.r = w.r;
  const DiscreteMeasure proj = drop_zero_weights(project_y(mu, w));
  rep.projected_mass = proj.mass();
  if (proj.empty() || !(rep.projected_mass > 0.0)) throw MeasureError("projection is empty: eta vanishes on the support");
  double h = cfg.bandwidth;
  if (!(h > 0.0)) h = silverman_bandwidth(proj);
  if (!(h > 0.0)) {
    h = 0.05 * (w.ky_upper[0] - w.ky_lower[0]);
    rep.notes.push_back("degenerate projection; Silverman bandwidth replaced by 5% of K_y");
  }
  for (double f : {1.0, 0.5, 0.25}) rep.schedule.emplace_back(h * f, kde_lr_norm(proj, w.ky_lower, w.ky_upper, w.r, h * f));
  const double n0 = rep.schedule[0].second;
  const double n1 = rep.schedule[1].second;
  const double n2 = rep.schedule[2].second;
  rep.extrapolated = (4.0 * n2 - n1) / 3.0;
  rep.growth_exponent = n0 > 0.0 && n2 > 0.0 ? std::log(n2 / n0) / std::log(4.0) : 0.0;
  rep.in_class = rep.growth_exponent < 0.2 && rep.extrapolated <= w.S;
  if (rep.growth_exponent >= 0.2) rep.notes.push_back("norm grows as the bandwidth shrinks; no L^r density on K_y");
  return rep;
}

namespace {

double entry_gap(const FrozenCoefficients& p, const FrozenCoefficients& q, const double* x) {
  const int d = p.dim();
  std::array<double, kMaxDim * kMaxDim> a1{};
  std::array<double, kMaxDim * kMaxDim> a2{};
  std::array<double, kMaxDim> b1{};
  std::array<double, kMaxDim> b2{};
  p.at(x, a1.data(), b1.data());
  q.at(x, a2.data(), b2.data());
  double g = 0.0;
  for (int k = 0; k < d * d; ++k) g = std::max(g, std::abs(a1[static_cast<std::size_t>(k)] - a2[static_cast<std::size_t>(k)]));
  for (int k = 0; k < d; ++k) g = std::max(g, std::abs(b1[static_cast<std::size_t>(k)] - b2[static_cast<std::size_t>(k)]));
  return g;
}

bool inside(const Cube& K, const double* x) {
  for (int i = 0; i < K.dim(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    if (x[i] < K.lower[s] || x[i] > K.upper[s]) return false;
  }
  return true;
}

double sup_gap(const FrozenCoefficients& p, const FrozenCoefficients& q, const std::vector<DiscreteMeasure>& tests,
               const Cube& K) {
  double best = 0.0;
  for (const DiscreteMeasure& mu : tests) {
    std::vector<double> terms(mu.size(), 0.0);
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (inside(K, mu.point(k))) terms[k] = mu.weight(k) * entry_gap(p, q, mu.point(k));
    }
    best = std::max(best, reduce_sum(terms));
  }
  return best;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0)) continue;
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

void finish(TrendReport& r) {
  r.slope = loglog_slope(r.params, r.gaps);
  r.final_gap = r.gaps.empty() ? 0.0 : r.gaps.back();
  r.monotone = true;
  for (std::size_t i = 1; i < r.gaps.size(); ++i) {
    if (r.gaps[i] > 1.1 * r.gaps[i - 1] + 1e-15) r.monotone = false;
  }
}

}  // namespace

double coefficient_gap(const CoefficientField& field, const DiscreteMeasure& s, const DiscreteMeasure& sigma,
                       const std::vector<DiscreteMeasure>& tests, const Cube& K) {
  if (K.dim() != field.dim()) throw ConfigError("cube dimension does not match the field");
  return sup_gap(*field.freeze(s), *field.freeze(sigma), tests, K);
}

TrendReport coefficient_convergence(const CoefficientField& field, const DiscreteMeasure& sigma,
                                    const std::vector<DiscreteMeasure>& sigma_seq, const std::vector<double>& params,
                                    const std::vector<DiscreteMeasure>& tests, const Cube& K, double tol) {
  if (sigma_seq.size() != params.size()) throw ConfigError("one parameter per measure in the sequence");
  if (tests.empty()) throw ConfigError("coefficient convergence needs test measures");
  TrendReport r;
  r.what = "coefficient-convergence";
  r.params = params;
  const auto limit = field.freeze(sigma);
  for (const DiscreteMeasure& s : sigma_seq) r.gaps.push_back(sup_gap(*field.freeze(s), *limit, tests, K));
  finish(r);
  r.passed = r.monotone && r.final_gap <= tol;
  if (!field.measure_dependent()) r.notes.push_back("field does not depend on the measure; gap vanishes identically");
  return r;
}

DiscreteMeasure empirical_sample(const DiscreteMeasure& mu, std::size_t n, std::uint64_t seed) {
  mu.require_probability(1e-9);
  std::vector<double> cdf(mu.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) cdf[k] = (cum += mu.weight(k));
  detail::Uniform01 u(seed);
  const int d = mu.dim();
  std::vector<double> pts;
  pts.reserve(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u.next() * cum;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), t);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), mu.size() - 1);
    pts.insert(pts.end(), mu.point(k), mu.point(k) + d);
  }
  return DiscreteMeasure::uniform(d, std::move(pts));
}

TrendReport coefficient_convergence_study(const CoefficientField& field, const DiscreteMeasure& sigma,
                                          const std::vector<std::size_t>& sizes, std::size_t seeds,
                                          const std::vector<DiscreteMeasure>& tests, const Cube& K, double factor,
                                          std::uint64_t seed) {
  if (sizes.empty() || seeds == 0) throw ConfigError("convergence study needs sizes and seeds");
  TrendReport r;
  r.what = "coefficient-convergence";
  r.gaps.assign(sizes.size(), 0.0);
  for (std::size_t n : sizes) r.params.push_back(static_cast<double>(n));
  const auto limit = field.freeze(sigma);
  for (std::size_t s = 0; s < seeds; ++s) {
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const DiscreteMeasure sample = empirical_sample(sigma, sizes[i], seed + 1000003ull * s + i);
      r.gaps[i] += sup_gap(*field.freeze(sample), *limit, tests, K) / static_cast<double>(seeds);
    }
  }
  finish(r);
  if (!field.measure_dependent()) {
    r.passed = r.final_gap == 0.0;
    r.notes.push_back("field does not depend on the measure; gap vanishes identically");
    return r;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double scaled = r.gaps[i] * std::sqrt(r.params[i]);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  r.passed = lo > 0.0 && hi / lo <= factor && r.monotone;
  std::ostringstream os;
  os << "gap * sqrt(n) ranges over [" << lo << ", " << hi << "] across " << seeds << " seeds";
  r.notes.push_back(os.str());
  return r;
}

TrendReport mollification_convergence(const FieldPtr& field, MollifierKernel::Kind kind,
                                      const std::vector<double>& deltas, const std::vector<DiscreteMeasure>& tests,
                                      const std::vector<DiscreteMeasure>& sigmas, const Cube& K, const Cube& Q,
                                      int nodes, double tol) {
  const int m = field->m();
  if (m < 1) throw ConfigError("mollification acts on y; the field has m = 0");
  if (K.dim() != field->dim() || Q.dim() != field->dim()) throw ConfigError("cube dimension does not match the field");
  for (int i = 0; i < m; ++i) {
    const auto s = static_cast<std::size_t>(i);
    if (K.lower[s] - Q.lower[s] < 1.0 || Q.upper[s] - K.upper[s] < 1.0) {
      throw ConfigError("Q_y must exceed K_y by more than one in every y-direction");
    }
  }
  if (tests.empty() || sigmas.empty()) throw ConfigError("mollification convergence needs tests and sigmas");
  TrendReport r;
  r.what = "mollification-convergence";
  r.params = deltas;
  for (double delta : deltas) {
    MollifierKernel k;
    k.kind = kind;
    k.delta = delta;
    k.nodes = nodes;
    const FieldPtr smooth = mollify(field, k);
    double best = 0.0;
    for (const DiscreteMeasure& sigma : sigmas) best = std::max(best, sup_gap(*field->freeze(sigma), *smooth->freeze(sigma), tests, K));
    r.gaps.push_back(best);
  }
  finish(r);
  r.passed = r.monotone && r.final_gap <= tol;
  return r;
}

DiscreteMeasure uniform_cloud(const Cube& K, int n) {
  std::vector<double> pts;
  const int d = K.dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  pts.reserve(total * static_cast<std::size_t>(d));
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    for (int i = d - 1; i >= 0; --i) {
      const auto s = static_cast<std::size_t>(i);
      const double t = (static_cast<double>(rest % static_cast<std::size_t>(n)) + 0.5) / n;
      x[s] = K.lower[s] + t * (K.upper[s] - K.lower[s]);
      rest /= static_cast<std::size_t>(n);
    }
    pts.insert(pts.end(), x.begin(), x.end());
  }
  return DiscreteMeasure::uniform(d, std::move(pts));
}

}  // namespace kolmofix
