#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kolmofix/coeff.hpp"
#include "kolmofix/measure.hpp"

namespace kolmofix {

struct RegularityConfig {
  ProjectionWindow window;
  double gamma = 1.0;
  /// Largest bandwidth of the schedule {h, h/2, h/4}; <= 0 selects Silverman.
  double bandwidth = 0.0;

  /// 1 + gamma for m = 1, m for m >= 2.
  double r_prime() const;
};

struct RegularityReport {
  int m = 1;
  double r = 2.0;
  double projected_mass = 0.0;
  std::vector<std::pair<double, double>> schedule;  // (bandwidth, norm)
  double extrapolated = 0.0;
  /// log(norm(h/4) / norm(h)) / log 4; about 1/r' for an atom, 0 for a density.
  double growth_exponent = 0.0;
  bool in_class = false;
  std::vector<std::string> notes;
};

/// KDE L^r norm of the eta-weighted y-projection over K_y, Richardson
/// extrapolated (order 2) across the bandwidth schedule.
RegularityReport projection_regularity(const DiscreteMeasure& mu, const RegularityConfig& cfg);

/// Integrability exponent used by the convergence hypothesis: +inf for
/// m = 0 (sup norm), 1 + gamma for m = 1, m otherwise.
double h2_exponent(int m, double gamma = 1.0);

struct TrendReport {
  std::string what;
  std::vector<double> params;  // n or delta
  std::vector<double> gaps;
  /// Least-squares slope of log gap against log param.
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool monotone = true;
  double final_gap = 0.0;
  bool passed = false;
  std::vector<std::string> notes;
};

/// sup over tests of int_K max_entry |a(., s) - a(., sigma)|, |b(., s) - b(., sigma)| dmu.
double coefficient_gap(const CoefficientField& field, const DiscreteMeasure& s, const DiscreteMeasure& sigma,
                       const std::vector<DiscreteMeasure>& tests, const Cube& K);

/// Gap for each sigma_n against sigma. passed: final gap below `tol` and
/// the sequence nonincreasing within 10%.
TrendReport coefficient_convergence(const CoefficientField& field, const DiscreteMeasure& sigma,
                                    const std::vector<DiscreteMeasure>& sigma_seq, const std::vector<double>& params,
                                    const std::vector<DiscreteMeasure>& tests, const Cube& K, double tol = 0.05);

/// Averages coefficient_convergence over seeds with sigma_n an n-point
/// sample drawn from sigma. passed: max/min of gap * sqrt(n) within `factor`.
TrendReport coefficient_convergence_study(const CoefficientField& field, const DiscreteMeasure& sigma,
                                          const std::vector<std::size_t>& sizes, std::size_t seeds,
                                          const std::vector<DiscreteMeasure>& tests, const Cube& K, double factor = 3.0,
                                          std::uint64_t seed = 1);

/// n i.i.d. draws from mu by inverse-CDF over its atoms.
DiscreteMeasure empirical_sample(const DiscreteMeasure& mu, std::size_t n, std::uint64_t seed);

/// Per-delta sup gap of |a - a_delta| over tests and sigmas. Throws
/// ConfigError when Q does not exceed K by at least one in every y-direction.
TrendReport mollification_convergence(const FieldPtr& field, MollifierKernel::Kind kind,
                                      const std::vector<double>& deltas, const std::vector<DiscreteMeasure>& tests,
                                      const std::vector<DiscreteMeasure>& sigmas, const Cube& K, const Cube& Q,
                                      int nodes = 64, double tol = 0.1);

/// Equal-weight atoms at the centres of `n` cells per axis of K.
DiscreteMeasure uniform_cloud(const Cube& K, int n);

}  // namespace kolmofix
