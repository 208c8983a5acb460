#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kolmofix/coeff.hpp"
#include "kolmofix/function.hpp"
#include "kolmofix/measure.hpp"

namespace kolmofix {

/// Integrating-factor solution rho ∝ a^{-1} exp(int b/a) at the cell centres
/// of a 1-D grid, normalised on the grid. Throws DegenerateCoefficientError
/// when a < tol somewhere.
GridDensity solve_1d_closed(const FrozenCoefficients& coeffs, const Axis& axis, double tol = 1e-12);

/// Zero-flux exponential-fitting finite volumes on a 1-D or 2-D grid with a
/// diagonal diffusion matrix. Cells outside radius() are excluded. Throws
/// SolverError on a failed linear solve or a negative density below -1e-10.
GridDensity solve_grid_fv(const FrozenCoefficients& coeffs, const std::vector<Axis>& axes);

struct SdeConfig {
  double dt = 1e-3;
  double T = 50.0;
  double burn_in = 10.0;
  std::size_t particles = 10000;
  std::uint64_t seed = 1;
  std::size_t snapshots = 200;
  /// |X| above this aborts the run.
  double guard = 1e6;
  unsigned threads = 1;

  void validate() const;
};

struct ErgodicResult {
  /// Snapshot-major atoms: snapshot s, particle p at index s * particles + p.
  DiscreteMeasure measure;
  std::size_t particles = 0;
  std::size_t snapshots = 0;
};

/// Euler-Maruyama for dX = b dt + sqrt(2A) dW started from systematic
/// resampling of `init`; returns the empirical measure over snapshots evenly
/// spaced in (burn_in, T]. Particles reflect at |x| = radius() when finite.
ErgodicResult solve_ergodic(const FrozenCoefficients& coeffs, const DiscreteMeasure& init, const SdeConfig& cfg);

/// Standard error of the mean of f from per-particle time averages.
double ergodic_std_error(const ErgodicResult& r, const std::function<double(const double*)>& f);

struct TestFunction {
  std::string name;
  Function f;
};

/// Products of probabilists' Hermite polynomials of total degree <= max_degree
/// times the bump exp(1 - 1/(1 - |x|^2/R^2)), each scaled to unit sup norm.
std::vector<TestFunction> default_battery(int dim, double R = 6.0, int max_degree = 4);

struct ResidualReport {
  double max_abs = 0.0;
  std::string worst;
  std::vector<double> values;  // per battery entry, signed
};

/// max over the battery of |∫ L_sigma u dmu|.
ResidualReport weak_residual(const DiscreteMeasure& mu, const FrozenCoefficients& coeffs,
                             const std::vector<TestFunction>& battery);

}  // namespace kolmofix
