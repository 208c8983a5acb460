#include <cmath>

#include "kolmofix/error.hpp"
#include "kolmofix/fixedpoint.hpp"

namespace kolmofix {
namespace {

class TruncatedFrozen final : public FrozenCoefficients {
 public:
  TruncatedFrozen(std::shared_ptr<const FrozenCoefficients> inner, TruncationScheme scheme,
                  std::shared_ptr<const FrozenFunction> V)
      : FrozenCoefficients(inner->dim()), inner_(std::move(inner)), scheme_(scheme), V_(std::move(V)) {}

  void at(const double* x, double* a, double* b) const override { inner_->at(x, a, b); }
  void block(const double* const* xs, std::size_t n, double* const* a, double* const* b) const override {
    inner_->block(xs, n, a, b);
  }
  bool diagonal() const override { return inner_->diagonal(); }
  bool constant_diffusion() const override { return inner_->constant_diffusion(); }
  double scale(const double* x) const override { return scheme_.phi(x, dim()); }
  double source(const double* x) const override {
    const double phi = scheme_.phi(x, dim());
    if (phi == 1.0) return 0.0;
    return -scheme_.Lambda * (1.0 - phi) * V_->value(x, dim());
  }
  double radius() const override { return scheme_.n + 1.0; }

 private:
  std::shared_ptr<const FrozenCoefficients> inner_;
  TruncationScheme scheme_;
  std::shared_ptr<const FrozenFunction> V_;
};

class TruncatedField final : public CoefficientField {
 public:
  TruncatedField(FieldPtr base, TruncationScheme scheme, Function V)
      : base_(std::move(base)), scheme_(scheme), V_(std::move(V)) {
    if (scheme_.n < 1) throw ConfigError("truncation level n must be positive");
    if (!(scheme_.Lambda > 0.0)) throw ConfigError("truncation needs Lambda > 0");
    if (!V_.valid() || V_.measure_dependent()) throw ConfigError("truncation needs a measure-independent V");
    frozen_V_ = V_.freeze(nullptr);
  }

  int dim() const override { return base_->dim(); }
  int m() const override { return base_->m(); }
  bool measure_dependent() const override { return base_->measure_dependent(); }

  std::shared_ptr<const FrozenCoefficients> freeze(const DiscreteMeasure& sigma) const override {
    const DiscreteMeasure nu = compensate_truncate(sigma, scheme_);
    return std::make_shared<TruncatedFrozen>(base_->freeze(nu), scheme_, frozen_V_);
  }

  std::string describe() const override {
    return base_->describe() + "; truncated at n = " + std::to_string(scheme_.n) +
           (scheme_.compensate ? " with origin atom" : " without origin atom");
  }

 private:
  FieldPtr base_;
  TruncationScheme scheme_;
  Function V_;
  std::shared_ptr<const FrozenFunction> frozen_V_;
};

}  // namespace

FieldPtr build_truncated_operator(const FieldPtr& field, const TruncationScheme& scheme, const Function& V) {
  return std::make_shared<TruncatedField>(field, scheme, V);
}

SolveReport localized_solve(const FieldPtr& field, const LyapunovSpec& lyap, const DiscreteMeasure& mu0,
                            const LocalizedConfig& loc, const PicardConfig& cfg) {
  if (loc.levels.empty()) throw ConfigError("localized solve needs at least one level");
  for (std::size_t i = 1; i < loc.levels.size(); ++i) {
    if (loc.levels[i] <= loc.levels[i - 1]) throw ConfigError("truncation levels must increase");
  }
  if (!lyap.V.valid()) throw ConfigError("localized solve needs V");
  const double M = std::isnan(loc.M) ? lyap.C / 2.0 : loc.M;
  const double bound = 2.0 * M / lyap.Lambda;

  SolveReport out;
  std::vector<LevelRecord> levels;
  std::vector<std::string> notes;
  bool have = false;
  double sup = 0.0;
  for (int n : loc.levels) {
    TruncationScheme scheme;
    scheme.n = n;
    scheme.Lambda = lyap.Lambda;
    scheme.compensate = loc.compensate;
    LevelRecord level;
    level.n = n;
    PicardConfig c = cfg;
    c.V = lyap.V;
    const double reach = n + 1.0;
    for (Axis& ax : c.axes) {
      const double w = ax.width();
      const double lo = std::max(ax.lower, -reach);
      const double hi = std::min(ax.upper, reach);
      ax.lower = lo;
      ax.upper = hi;
      ax.cells = std::max(2, static_cast<int>(std::llround((hi - lo) / w)));
    }
    try {
      SolveReport r = picard_solve(*build_truncated_operator(field, scheme, lyap.V), mu0, c);
      level.status = r.status;
      level.iterations = static_cast<int>(r.iterates.size());
      level.v_moment = lyapunov_integral(r.final_measure, lyap.V);
      std::vector<double> phi(r.final_measure.size());
      for (std::size_t k = 0; k < phi.size(); ++k) {
        phi[k] = r.final_measure.weight(k) * scheme.phi(r.final_measure.point(k), r.final_measure.dim());
      }
      level.mass_defect = 1.0 - reduce_sum(phi);
      sup = std::max(sup, level.v_moment);
      out = std::move(r);
      have = true;
    } catch (const Error& e) {
      level.error = e.what();
      notes.push_back("level n = " + std::to_string(n) + " failed: " + e.what());
    }
    levels.push_back(level);
  }
  out.levels = std::move(levels);
  out.notes.insert(out.notes.end(), notes.begin(), notes.end());
  out.uniform_bound = sup;
  out.bound_estimate = bound;
  out.bound_ok = have && sup <= bound * (1.0 + loc.slack);
  if (!have) {
    out.status = SolveStatus::max_iter;
    out.notes.push_back("no truncation level produced a solution");
  }
  return out;
}

}  // namespace kolmofix
