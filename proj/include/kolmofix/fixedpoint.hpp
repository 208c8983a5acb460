#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kolmofix/coeff.hpp"
#include "kolmofix/frozen.hpp"
#include "kolmofix/lyapunov.hpp"
#include "kolmofix/measure.hpp"

namespace kolmofix {

enum class Backend { closed, grid, particle };

Backend parse_backend(const std::string& name);
std::string backend_name(Backend b);

struct PicardConfig {
  double theta = 0.5;
  int max_iter = 50;
  double tol = 1e-3;
  Backend backend = Backend::grid;
  /// Grid axes for the closed and grid backends.
  std::vector<Axis> axes;
  SdeConfig sde;
  /// Moment budget of P_R(V); iterates with int V > 10 R are `diverged`.
  double R = 10.0;
  /// Unset means sum_i x_i^2 / 2.
  Function V;
  /// Iterates are compressed to at most this many atoms.
  std::size_t max_atoms = 200000;
  /// Weak residual of every iterate against its own coefficients.
  bool residual_each_iter = true;
  /// Empty means default_battery(d).
  std::vector<TestFunction> battery;

  void validate() const;
};

enum class SolveStatus { converged, max_iter, diverged };
std::string status_name(SolveStatus s);

struct IterateRecord {
  int iter = 0;
  double theta = 1.0;
  double distance = 0.0;
  double v_moment = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
};

struct LevelRecord {
  int n = 0;
  SolveStatus status = SolveStatus::max_iter;
  double v_moment = std::numeric_limits<double>::quiet_NaN();
  double mass_defect = 0.0;
  int iterations = 0;
  std::string error;
};

struct SolveReport {
  std::vector<IterateRecord> iterates;
  SolveStatus status = SolveStatus::max_iter;
  DiscreteMeasure final_measure;
  /// Set by the closed and grid backends.
  std::optional<GridDensity> final_grid;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  std::string worst_test_function;
  bool in_PR = false;
  bool cycle_detected = false;
  std::vector<std::string> notes;
  std::vector<AssumptionReport> assumptions;

  // localized_solve only
  std::vector<LevelRecord> levels;
  double uniform_bound = std::numeric_limits<double>::quiet_NaN();
  double bound_estimate = std::numeric_limits<double>::quiet_NaN();
  bool bound_ok = true;
};

/// sigma_{k+1} = (1 - theta) sigma_k + theta Phi(sigma_k); the first step is
/// undamped. Inner failures are rethrown as SolverError naming the iteration.
SolveReport picard_solve(const CoefficientField& field, const DiscreteMeasure& mu0, const PicardConfig& cfg);

/// Frozen solve of the linear equation for the given measure.
struct FrozenSolution {
  DiscreteMeasure measure;
  std::optional<GridDensity> grid;
};
FrozenSolution frozen_solve(const FrozenCoefficients& coeffs, const DiscreteMeasure& start, const PicardConfig& cfg);

/// Field whose generator is phi_n L_{nu_n} f - Lambda (1 - phi_n) V with
/// nu_n = compensate_truncate(mu, scheme); solvers see the coefficients of
/// L_{nu_n} restricted to B_{n+1}.
FieldPtr build_truncated_operator(const FieldPtr& field, const TruncationScheme& scheme, const Function& V);

struct LocalizedConfig {
  std::vector<int> levels{4, 6, 8};
  bool compensate = true;
  /// Bound constant M; unset (NaN) means C / 2, giving the bound C / Lambda.
  double M = std::numeric_limits<double>::quiet_NaN();
  double slack = 0.1;
};

/// picard_solve on each truncated operator. Per-level failures are recorded
/// and the run continues; the final measure is the largest successful level.
SolveReport localized_solve(const FieldPtr& field, const LyapunovSpec& lyap, const DiscreteMeasure& mu0,
                            const LocalizedConfig& loc, const PicardConfig& cfg);

}  // namespace kolmofix
