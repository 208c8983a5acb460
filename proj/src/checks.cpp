#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kolmofix/coeff.hpp"
#include "kolmofix/error.hpp"
#include "rng.hpp"

namespace kolmofix {
namespace {

double min_eigenvalue(const double* a, int d, int size) {
  if (size == 1) return a[0];
  Eigen::MatrixXd M(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) M(i, j) = a[i * d + j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}


bool finite_all(const double* v, int n) {
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

/// Measure-independent fields need only one frozen copy.
std::vector<DiscreteMeasure> effective_measures(const CoefficientField& field, const std::vector<DiscreteMeasure>& measures) {
  if (!field.measure_dependent() || measures.empty()) {
    return {DiscreteMeasure::dirac(std::vector<double>(static_cast<std::size_t>(field.dim()), 0.0))};
  }
  return measures;
}

}  // namespace

AssumptionReport check_H11(const CoefficientField& field, const Cube& K, const std::vector<DiscreteMeasure>& measures,
                           int resolution, double tol) {
  AssumptionReport rep;
  rep.condition = "H1.1";
  const int d = field.dim();
  const int m = field.m();
  if (m == 0) {
    rep.passed = true;
    rep.notes.push_back("m = 0: no non-degenerate block, condition holds trivially");
    return rep;
  }
  const auto pts = cube_nodes(K, resolution);
  const auto family = effective_measures(field, measures);
  double lambda = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
  std::size_t argmin_measure = 0;
  std::array<double, kMaxDim * kMaxDim> a{};
  std::array<double, kMaxDim> b{};
  for (std::size_t mi = 0; mi < family.size(); ++mi) {
    const auto frozen = field.freeze(family[mi]);
    for (const auto& x : pts) {
      try {
        frozen->at(x.data(), a.data(), b.data());
      } catch (const EvalError& e) {
        rep.violations.push_back({x, mi, std::nan(""), std::string("evaluation failed: ") + e.what()});
        continue;
      }
      ++rep.evaluations;
      if (!finite_all(a.data(), d * d)) {
        rep.violations.push_back({x, mi, std::nan(""), "non-finite diffusion"});
        continue;
      }
      const double full = min_eigenvalue(a.data(), d, d);
      if (full < -1e-10) rep.violations.push_back({x, mi, full, "diffusion matrix is not positive semidefinite"});
      const double lam = min_eigenvalue(a.data(), d, m);
      if (lam < lambda) {
        lambda = lam;
        argmin = x;
        argmin_measure = mi;
      }
    }
  }
  rep.lambda_est = lambda;
  if (!(lambda > tol)) {
    rep.violations.push_back({argmin, argmin_measure, lambda, "smallest eigenvalue of the leading block is not above tolerance"});
  }
  rep.passed = rep.violations.empty();
  rep.notes.push_back("sampled " + std::to_string(pts.size()) + " points x " + std::to_string(family.size()) +
                      " measures; a sample, not a certificate");
  return rep;
}

AssumptionReport check_H12(const CoefficientField& field, const Cube& K, const std::vector<DiscreteMeasure>& measures,
                           int resolution) {
  AssumptionReport rep;
  rep.condition = "H1.2";
  const int d = field.dim();
  const auto pts = cube_nodes(K, resolution);
  const auto family = effective_measures(field, measures);
  double sup = 0.0;
  std::array<double, kMaxDim * kMaxDim> a{};
  std::array<double, kMaxDim> b{};
  for (std::size_t mi = 0; mi < family.size(); ++mi) {
    const auto frozen = field.freeze(family[mi]);
    for (const auto& x : pts) {
      try {
        frozen->at(x.data(), a.data(), b.data());
      } catch (const EvalError& e) {
        rep.violations.push_back({x, mi, std::nan(""), std::string("evaluation failed: ") + e.what()});
        continue;
      }
      ++rep.evaluations;
      if (!finite_all(a.data(), d * d) || !finite_all(b.data(), d)) {
        rep.violations.push_back({x, mi, std::nan(""), "non-finite coefficient"});
        continue;
      }
      double amax = 0.0;
      double bmax = 0.0;
      for (int k = 0; k < d * d; ++k) amax = std::max(amax, std::abs(a[static_cast<std::size_t>(k)]));
      for (int k = 0; k < d; ++k) bmax = std::max(bmax, std::abs(b[static_cast<std::size_t>(k)]));
      sup = std::max(sup, amax + bmax);
    }
  }
  rep.sup_bound_est = sup;
  rep.passed = rep.violations.empty();
  return rep;
}

AssumptionReport check_H13(const CoefficientField& field, const Cube& K, const std::vector<DiscreteMeasure>& measures,
                           std::size_t pair_budget, std::uint64_t seed) {
  AssumptionReport rep;
  rep.condition = "H1.3";
  const int d = field.dim();
  const int m = field.m();
  if (m == d) {
    rep.passed = true;
    rep.notes.push_back("m = d: no degenerate coordinates, modulus in z is vacuous");
    return rep;
  }
  double zdiam = 0.0;
  for (int i = m; i < d; ++i) {
    const double w = K.upper[static_cast<std::size_t>(i)] - K.lower[static_cast<std::size_t>(i)];
    zdiam += w * w;
  }
  zdiam = std::sqrt(zdiam);
  constexpr int kBins = 32;
  const double lo = 1e-6 * zdiam;
  const double log_lo = std::log(lo);
  const double log_span = std::log(zdiam) - log_lo;
  std::array<double, kBins> bin_dist{};
  std::array<double, kBins> bin_gap{};
  std::array<bool, kBins> bin_used{};
  std::array<Witness, kBins> bin_witness{};

  const auto family = effective_measures(field, measures);
  std::vector<std::shared_ptr<const FrozenCoefficients>> frozen;
  for (const auto& mu : family) frozen.push_back(field.freeze(mu));

  double sup = 0.0;
  auto gap_of = [&](const std::vector<double>& x1, const std::vector<double>& x2, std::size_t mi) {
    std::array<double, kMaxDim * kMaxDim> a1{};
    std::array<double, kMaxDim> b1{};
    std::array<double, kMaxDim * kMaxDim> a2{};
    std::array<double, kMaxDim> b2{};
    frozen[mi]->at(x1.data(), a1.data(), b1.data());
    frozen[mi]->at(x2.data(), a2.data(), b2.data());
    rep.evaluations += 2;
    double g = 0.0;
    for (int k = 0; k < d * d; ++k) {
      g = std::max(g, std::abs(a1[static_cast<std::size_t>(k)] - a2[static_cast<std::size_t>(k)]));
      sup = std::max(sup, std::abs(a1[static_cast<std::size_t>(k)]));
    }
    for (int k = 0; k < d; ++k) {
      g = std::max(g, std::abs(b1[static_cast<std::size_t>(k)] - b2[static_cast<std::size_t>(k)]));
      sup = std::max(sup, std::abs(b1[static_cast<std::size_t>(k)]));
    }
    return g;
  };
  auto dist_of = [&](const std::vector<double>& x1, const std::vector<double>& x2) {
    double s = 0.0;
    for (int i = m; i < d; ++i) s += (x1[static_cast<std::size_t>(i)] - x2[static_cast<std::size_t>(i)]) * (x1[static_cast<std::size_t>(i)] - x2[static_cast<std::size_t>(i)]);
    return std::sqrt(s);
  };
  auto record = [&](double dist, double gap, const std::vector<double>& x, std::size_t mi) {
    if (!(dist > 0.0)) return;
    int bin = static_cast<int>(std::floor((std::log(dist) - log_lo) / log_span * kBins));
    bin = std::clamp(bin, 0, kBins - 1);
    const auto b = static_cast<std::size_t>(bin);
    if (!bin_used[b] || dist > bin_dist[b]) bin_dist[b] = dist;
    if (!bin_used[b] || gap > bin_gap[b]) {
      bin_gap[b] = gap;
      bin_witness[b] = {x, mi, gap, "coefficient gap"};
    }
    bin_used[b] = true;
  };

  struct Pair {
    std::vector<double> x1, x2;
    std::size_t mi;
    double gap;
  };
  std::vector<Pair> top;
  detail::Uniform01 rng(seed);
  const std::size_t per_measure = std::max<std::size_t>(1, pair_budget / family.size());
  for (std::size_t mi = 0; mi < family.size(); ++mi) {
    for (std::size_t p = 0; p < per_measure; ++p) {
      std::vector<double> x1(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        x1[static_cast<std::size_t>(i)] = K.lower[static_cast<std::size_t>(i)] +
                                          rng.next() * (K.upper[static_cast<std::size_t>(i)] - K.lower[static_cast<std::size_t>(i)]);
      }
      // Log-uniform distance along a random direction in z, reflected into K.
      const double t = std::exp(log_lo + (p + rng.next()) / per_measure * log_span);
      std::vector<double> dir(static_cast<std::size_t>(d - m));
      double norm = 0.0;
      for (double& u : dir) {
        u = rng.next() - 0.5;
        norm += u * u;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      std::vector<double> x2 = x1;
      for (int i = m; i < d; ++i) {
        const auto s = static_cast<std::size_t>(i);
        double v = x1[s] + t * dir[static_cast<std::size_t>(i - m)] / norm;
        if (v > K.upper[s]) v = x1[s] - t * dir[static_cast<std::size_t>(i - m)] / norm;
        if (v < K.lower[s]) v = x1[s] - t * dir[static_cast<std::size_t>(i - m)] / norm;
        x2[s] = std::clamp(v, K.lower[s], K.upper[s]);
      }
      double g = 0.0;
      try {
        g = gap_of(x1, x2, mi);
      } catch (const EvalError& e) {
        rep.violations.push_back({x1, mi, std::nan(""), std::string("evaluation failed: ") + e.what()});
        continue;
      }
      if (!std::isfinite(g)) {
        rep.violations.push_back({x1, mi, g, "non-finite coefficient"});
        continue;
      }
      record(dist_of(x1, x2), g, x1, mi);
      top.push_back({x1, x2, mi, g});
    }
  }

  // Bisection on the largest gaps: a jump keeps its size as the pair shrinks.
  std::sort(top.begin(), top.end(), [](const Pair& a, const Pair& b) { return a.gap > b.gap; });
  if (top.size() > 16) top.resize(16);
  for (Pair p : top) {
    if (!(p.gap > 0.0)) continue;
    for (int it = 0; it < 40; ++it) {
      std::vector<double> mid(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) mid[static_cast<std::size_t>(i)] = 0.5 * (p.x1[static_cast<std::size_t>(i)] + p.x2[static_cast<std::size_t>(i)]);
      const double g1 = gap_of(p.x1, mid, p.mi);
      const double g2 = gap_of(mid, p.x2, p.mi);
      if (g1 >= g2) {
        p.x2 = mid;
        p.gap = g1;
      } else {
        p.x1 = mid;
        p.gap = g2;
      }
      record(dist_of(p.x1, p.x2), p.gap, p.x1, p.mi);
    }
  }

  double envelope = 0.0;
  bool first = true;
  for (std::size_t b = 0; b < kBins; ++b) {
    if (!bin_used[b]) continue;
    envelope = std::max(envelope, bin_gap[b]);
    rep.modulus_samples.emplace_back(bin_dist[b], envelope);
    if (first) {
      first = false;
      if (envelope > 1e-3 * (1.0 + sup)) {
        Witness w = bin_witness[b];
        w.what = "coefficient gap does not vanish as |z - z'| -> 0 (discontinuity in z)";
        rep.violations.push_back(w);
      }
    }
  }
  rep.sup_bound_est = sup;
  rep.passed = rep.violations.empty();
  rep.notes.push_back("empirical modulus from " + std::to_string(per_measure * family.size()) + " pairs over " +
                      std::to_string(family.size()) + " measures; a sample, not a certificate");
  return rep;
}

}  // namespace kolmofix
