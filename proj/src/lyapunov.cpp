#include "kolmofix/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kolmofix/error.hpp"
#include "rng.hpp"

namespace kolmofix {

double apply_generator(const CoefficientField& field, const DiscreteMeasure& mu, const Function& f, const double* x) {
  const auto coeffs = field.freeze(mu);
  const Jet u = f.jet(x, field.dim(), &mu);
  return coeffs->generator(u, x);
}

namespace {

struct Sample {
  std::size_t point = 0;
  std::size_t measure = 0;
  double lhs = 0.0;
  double v = 0.0;
};

std::vector<Sample> pointwise_samples(const CoefficientField& field, const Function& V,
                                      const std::vector<std::vector<double>>& points,
                                      const std::vector<DiscreteMeasure>& measures) {
  const int d = field.dim();
  std::vector<Sample> out;
  out.reserve(points.size() * measures.size());
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const auto coeffs = field.freeze(measures[m]);
    const auto v = V.freeze(&measures[m]);
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double* x = points[p].data();
      const Jet j = v->jet(x, d);
      out.push_back({p, m, coeffs->generator(j, x), j.v});
    }
  }
  return out;
}

void add_witness(CheckReport& r, std::vector<double> x, std::size_t measure, double excess, std::string what) {
  r.passed = false;
  if (r.witnesses.size() < kMaxWitnesses) r.witnesses.push_back({std::move(x), measure, excess, std::move(what)});
}

CheckReport judge_pointwise(const std::vector<Sample>& samples, const std::vector<std::vector<double>>& points,
                            std::size_t measures, double C, double Lambda, Tolerance tol) {
  CheckReport r;
  r.condition = "pointwise";
  r.C = C;
  r.Lambda = Lambda;
  r.measures = measures;
  r.evaluations = samples.size();
  // Keep the worst excess per measure as the witness, then the worst overall.
  std::vector<const Sample*> worst(measures, nullptr);
  std::vector<double> worst_excess(measures, 0.0);
  for (const Sample& s : samples) {
    const double rhs = C - Lambda * s.v;
    const double excess = s.lhs - rhs;
    r.max_excess = std::max(r.max_excess, excess);
    r.best_C = std::max(r.best_C, s.lhs + Lambda * s.v);
    if (s.v > 0.0) r.best_Lambda = std::min(r.best_Lambda, (C - s.lhs) / s.v);
    if (excess > tol.allow(rhs) && (!worst[s.measure] || excess > worst_excess[s.measure])) {
      worst[s.measure] = &s;
      worst_excess[s.measure] = excess;
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t m = 0; m < measures; ++m) {
    if (worst[m]) order.push_back(m);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return worst_excess[a] > worst_excess[b]; });
  for (std::size_t m : order) {
    std::ostringstream os;
    os << "L V = " << worst[m]->lhs << " > C - Lambda V = " << C - Lambda * worst[m]->v;
    add_witness(r, points[worst[m]->point], m, worst_excess[m], os.str());
  }
  return r;
}

}  // namespace

CheckReport check_pointwise(const CoefficientField& field, const Function& V, double C, double Lambda,
                            const std::vector<std::vector<double>>& points, const std::vector<DiscreteMeasure>& measures,
                            Tolerance tol) {
  const auto samples = pointwise_samples(field, V, points, measures);
  return judge_pointwise(samples, points, measures.size(), C, Lambda, tol);
}

std::vector<double> default_C_sweep() { return {0.1, 1.0, 3.0, 10.0}; }
std::vector<double> default_Lambda_sweep() { return {0.5, 1.0, 2.0, 4.0}; }

SweepReport sweep_pointwise(const CoefficientField& field, const Function& V, const std::vector<double>& Cs,
                            const std::vector<double>& Lambdas, const std::vector<std::vector<double>>& points,
                            const std::vector<DiscreteMeasure>& measures, Tolerance tol) {
  const auto samples = pointwise_samples(field, V, points, measures);
  SweepReport s;
  for (double C : Cs) {
    for (double L : Lambdas) {
      s.entries.push_back(judge_pointwise(samples, points, measures.size(), C, L, tol));
      const CheckReport& e = s.entries.back();
      s.any_passed = s.any_passed || e.passed;
      s.all_failed_with_witness = s.all_failed_with_witness && !e.passed && !e.witnesses.empty();
    }
  }
  return s;
}

CheckReport check_integral(const CoefficientField& field, const LyapunovSpec& spec,
                           const std::vector<DiscreteMeasure>& measures, Tolerance tol) {
  if (!spec.V.valid()) throw ConfigError("integral check needs V");
  const Function& W = spec.w();
  const int d = field.dim();
  CheckReport r;
  r.condition = "integral";
  r.C = spec.C;
  r.Lambda = spec.Lambda;
  r.measures = measures.size();
  std::vector<std::pair<double, std::size_t>> bad;
  std::vector<double> excesses(measures.size());
  std::vector<double> lhs_of(measures.size());
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const DiscreteMeasure& mu = measures[m];
    const auto coeffs = field.freeze(mu);
    const auto w = W.freeze(&mu);
    std::vector<double> terms(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double* x = mu.point(k);
      terms[k] = mu.weight(k) * coeffs->generator(w->jet(x, d), x);
    }
    r.evaluations += mu.size();
    const double lhs = reduce_sum(terms);
    const double iv = lyapunov_integral(mu, spec.V);
    const double rhs = spec.C - spec.Lambda * iv;
    const double excess = lhs - rhs;
    excesses[m] = excess;
    lhs_of[m] = lhs;
    r.max_excess = std::max(r.max_excess, excess);
    r.best_C = std::max(r.best_C, lhs + spec.Lambda * iv);
    if (iv > 0.0) r.best_Lambda = std::min(r.best_Lambda, (spec.C - lhs) / iv);
    if (excess > tol.allow(rhs)) bad.emplace_back(excess, m);
  }
  std::stable_sort(bad.begin(), bad.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [excess, m] : bad) {
    std::ostringstream os;
    os << "int L W dmu = " << lhs_of[m] << " exceeds C - Lambda int V dmu by " << excess;
    std::vector<double> x(measures[m].point(0), measures[m].point(0) + d);
    add_witness(r, std::move(x), m, excess, os.str());
  }
  r.notes.push_back("measures are a finite sample; the condition quantifies over all compactly supported measures");
  return r;
}

CheckReport check_H32(const CoefficientField& field, const LyapunovSpec& spec,
                      const std::vector<DiscreteMeasure>& measures, const Cube* domain, double eps, Tolerance tol) {
  const Function& W = spec.w();
  if (!W.valid()) throw ConfigError("H3.2 check needs W or V");
  const int d = field.dim();
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  CheckReport r;
  r.condition = "H3.2";
  r.C = spec.C1;
  r.Lambda = spec.C2;
  r.measures = measures.size();
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const DiscreteMeasure& mu = measures[m];
    const double lhs = -apply_generator(field, mu, W, origin.data());
    const double ih = spec.H.valid() ? lyapunov_integral(mu, spec.H) : 0.0;
    const double rhs = spec.C1 + spec.C2 * ih;
    const double excess = lhs - rhs;
    ++r.evaluations;
    r.max_excess = std::max(r.max_excess, excess);
    r.best_C = std::max(r.best_C, lhs - spec.C2 * ih);
    if (excess > tol.allow(rhs)) {
      std::ostringstream os;
      os << "-L W(0) = " << lhs << " > C1 + C2 int H dmu = " << rhs;
      add_witness(r, origin, m, excess, os.str());
    }
  }
  if (!spec.H.valid()) r.notes.push_back("H not given; H = 0 used");
  if (domain && spec.H.valid() && spec.V.valid()) {
    double worst = 0.0;
    std::vector<double> at;
    for (const auto& x : cube_nodes(*domain, d == 1 ? 201 : d == 2 ? 41 : 11)) {
      double outer = 0.0;
      for (int i = 0; i < d; ++i) {
        const auto s = static_cast<std::size_t>(i);
        const double c = 0.5 * (domain->lower[s] + domain->upper[s]);
        const double half = 0.5 * (domain->upper[s] - domain->lower[s]);
        outer = std::max(outer, std::abs(x[s] - c) / half);
      }
      if (outer < 0.9) continue;
      const double v = spec.V(x.data(), d);
      const double ratio = v > 0.0 ? spec.H(x.data(), d) / v : std::numeric_limits<double>::infinity();
      ++r.evaluations;
      if (ratio > worst) {
        worst = ratio;
        at = x;
      }
    }
    r.value = worst;
    if (worst > eps) {
      std::ostringstream os;
      os << "H/V = " << worst << " > " << eps << " on the boundary shell";
      add_witness(r, at, 0, worst - eps, os.str());
    }
  }
  return r;
}

CheckReport verify_moment_bound(const DiscreteMeasure& solution, const Function& V, double C, double Lambda,
                                double slack) {
  if (!(Lambda > 0.0)) throw ConfigError("Lambda must be positive");
  CheckReport r;
  r.condition = "moment-bound";
  r.C = C;
  r.Lambda = Lambda;
  r.measures = 1;
  r.evaluations = solution.size();
  r.value = lyapunov_integral(solution, V);
  r.bound = C / Lambda;
  r.max_excess = r.value - r.bound;
  r.best_C = Lambda * r.value;
  if (r.value > 0.0) r.best_Lambda = C / r.value;
  if (r.value > r.bound * (1.0 + slack)) {
    std::ostringstream os;
    os << "int V dmu = " << r.value << " > C/Lambda = " << r.bound;
    add_witness(r, {}, 0, r.value - r.bound, os.str());
  }
  return r;
}

std::vector<DiscreteMeasure> random_clouds(int dim, std::size_t count, std::size_t max_atoms, double half_width,
                                           std::uint64_t seed) {
  detail::Uniform01 u(seed);
  std::vector<DiscreteMeasure> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t n = 1 + static_cast<std::size_t>(u.next() * static_cast<double>(max_atoms));
    std::vector<double> pts(n * static_cast<std::size_t>(dim));
    for (double& x : pts) x = u.in(-half_width, half_width);
    std::vector<double> w(n);
    for (double& x : w) x = 0.05 + u.next();
    const double total = reduce_sum(w);
    for (double& x : w) x /= total;
    out.emplace_back(dim, std::move(pts), std::move(w));
  }
  return out;
}

std::vector<DiscreteMeasure> dirac_family(const std::vector<std::vector<double>>& points) {
  std::vector<DiscreteMeasure> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(DiscreteMeasure::dirac(p));
  return out;
}

std::vector<Function> independent_candidates(int dim) {
  auto sum_of = [dim](const std::string& pattern) {
    std::string s;
    for (int i = 1; i <= dim; ++i) {
      std::string t = pattern;
      for (std::size_t p = t.find('#'); p != std::string::npos; p = t.find('#')) t.replace(p, 1, std::to_string(i));
      s += (i > 1 ? " + " : "") + t;
    }
    return s;
  };
  return {Function::parse(sum_of("x#^2")), Function::parse(sum_of("x#^2/2")), Function::parse("1 + " + sum_of("x#^2")),
          Function::parse(sum_of("x#^4/4")), Function::parse("sqrt(1 + " + sum_of("x#^2") + ")")};
}

}  // namespace kolmofix
