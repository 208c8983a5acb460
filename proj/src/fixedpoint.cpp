#include "kolmofix/fixedpoint.hpp"

#include <cmath>
#include <sstream>

#include "kolmofix/error.hpp"

namespace kolmofix {

Backend parse_backend(const std::string& name) {
  if (name == "closed") return Backend::closed;
  if (name == "grid") return Backend::grid;
  if (name == "particle") return Backend::particle;
  throw ConfigError("unknown backend '" + name + "' (closed, grid or particle)");
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::closed:
      return "closed";
    case Backend::grid:
      return "grid";
    case Backend::particle:
      return "particle";
  }
  return "?";
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iter:
      return "max_iter";
    case SolveStatus::diverged:
      return "diverged";
  }
  return "?";
}

void PicardConfig::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("picard.theta must lie in (0, 1]");
  if (!(tol > 0.0)) throw ConfigError("picard.tol must be positive");
  if (max_iter < 1) throw ConfigError("picard.max_iter must be at least 1");
  if (!(R > 0.0)) throw ConfigError("picard.R must be positive");
  if (max_atoms < 16) throw ConfigError("picard.max_atoms must be at least 16");
  if (backend == Backend::particle) sde.validate();
  if (backend == Backend::closed && axes.size() > 1) throw ConfigError("closed backend is 1-D only");
}

namespace {

Function half_square(int d) {
  std::string s;
  for (int i = 1; i <= d; ++i) s += (i > 1 ? " + " : "") + std::string("x") + std::to_string(i) + "^2";
  return Function::parse("(" + s + ")/2");
}

std::vector<Axis> axes_for(const PicardConfig& cfg, int d) {
  if (!cfg.axes.empty()) {
    if (static_cast<int>(cfg.axes.size()) != d) throw ConfigError("grid axes do not match the dimension");
    return cfg.axes;
  }
  return std::vector<Axis>(static_cast<std::size_t>(d), Axis{-8.0, 8.0, d == 1 ? 400 : 100});
}

}  // namespace

FrozenSolution frozen_solve(const FrozenCoefficients& coeffs, const DiscreteMeasure& start, const PicardConfig& cfg) {
  const int d = coeffs.dim();
  FrozenSolution s;
  switch (cfg.backend) {
    case Backend::closed: {
      const auto axes = axes_for(cfg, d);
      if (d != 1) throw ConfigError("closed backend is 1-D only");
      s.grid = solve_1d_closed(coeffs, axes[0]);
      s.measure = s.grid->to_measure(true);
      break;
    }
    case Backend::grid:
      s.grid = solve_grid_fv(coeffs, axes_for(cfg, d));
      s.measure = s.grid->to_measure(true);
      break;
    case Backend::particle:
      s.measure = solve_ergodic(coeffs, start, cfg.sde).measure;
      break;
  }
  return s;
}

SolveReport picard_solve(const CoefficientField& field, const DiscreteMeasure& mu0, const PicardConfig& cfg) {
  cfg.validate();
  const int d = field.dim();
  if (mu0.dim() != d) throw MeasureError("initial measure has the wrong dimension");
  mu0.require_probability(1e-9);
  const Function V = cfg.V.valid() ? cfg.V : half_square(d);
  const std::vector<TestFunction> battery = cfg.battery.empty() ? default_battery(d) : cfg.battery;

  SolveReport rep;
  auto residual_of = [&](const DiscreteMeasure& mu) {
    const ResidualReport r = weak_residual(mu, *field.freeze(mu), battery);
    rep.worst_test_function = r.worst;
    return r.max_abs;
  };
  auto solve_at = [&](const DiscreteMeasure& sigma, int iter) {
    try {
      return frozen_solve(*field.freeze(sigma), mu0, cfg);
    } catch (const Error& e) {
      throw SolverError("Picard iteration " + std::to_string(iter) + ": " + e.what());
    }
  };

  if (!field.measure_dependent()) {
    FrozenSolution s = solve_at(mu0, 0);
    IterateRecord rec;
    rec.iter = 0;
    rec.theta = 1.0;
    rec.distance = 0.0;
    rec.v_moment = lyapunov_integral(s.measure, V);
    rec.residual = residual_of(s.measure);
    rep.iterates.push_back(rec);
    rep.status = SolveStatus::converged;
    rep.final_measure = std::move(s.measure);
    rep.final_grid = std::move(s.grid);
    rep.final_residual = rec.residual;
    rep.notes.push_back("coefficients do not depend on the measure; one frozen solve is the fixed point");
  } else {
    DiscreteMeasure sigma = compress(mu0, cfg.max_atoms);
    DiscreteMeasure before;  // sigma_{k-1}
    double theta = cfg.theta;
    double last = std::numeric_limits<double>::infinity();
    std::optional<GridDensity> grid;
    for (int k = 0; k < cfg.max_iter; ++k) {
      FrozenSolution s = solve_at(sigma, k);
      const double t = k == 0 ? 1.0 : theta;
      DiscreteMeasure next = t == 1.0 ? std::move(s.measure) : mixture(sigma, 1.0 - t, s.measure, t);
      next = compress(next, cfg.max_atoms);
      grid = t == 1.0 ? std::move(s.grid) : std::nullopt;

      IterateRecord rec;
      rec.iter = k;
      rec.theta = t;
      rec.distance = measure_distance(next, sigma, &V);
      rec.v_moment = lyapunov_integral(next, V);
      if (cfg.residual_each_iter) rec.residual = residual_of(next);
      rep.iterates.push_back(rec);

      if (!before.empty() && rec.distance > cfg.tol && measure_distance(next, before, &V) <= cfg.tol) {
        if (!rep.cycle_detected) {
          rep.notes.push_back("period-2 cycle detected at iteration " + std::to_string(k));
        }
        rep.cycle_detected = true;
      }
      before = std::move(sigma);
      sigma = std::move(next);

      if (rec.v_moment > 10.0 * cfg.R) {
        rep.status = SolveStatus::diverged;
        std::ostringstream os;
        os << "int V dmu = " << rec.v_moment << " exceeds 10 R = " << 10.0 * cfg.R << " at iteration " << k;
        rep.notes.push_back(os.str());
        break;
      }
      if (rec.distance <= cfg.tol) {
        rep.status = SolveStatus::converged;
        break;
      }
      if (k > 0 && rec.distance > last) theta = std::max(theta / 2.0, 1.0 / 1024.0);
      last = rec.distance;
    }
    rep.final_measure = std::move(sigma);
    rep.final_grid = std::move(grid);
    rep.final_residual = cfg.residual_each_iter ? rep.iterates.back().residual : residual_of(rep.final_measure);
  }
  rep.in_PR = lyapunov_integral(rep.final_measure, V) <= cfg.R * 1.05;
  if (!rep.in_PR) rep.notes.push_back("final measure lies outside P_R(V) with 5% slack");
  return rep;
}

}  // namespace kolmofix
