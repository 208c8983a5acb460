#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kolmofix/coeff.hpp"
#include "kolmofix/function.hpp"
#include "kolmofix/measure.hpp"

namespace kolmofix {

/// V, W(x, mu), H and the constants of the integral drift conditions.
/// W may be unset, in which case V is used.
struct LyapunovSpec {
  Function V;
  Function W;
  Function H;
  double C = 1.0;
  double Lambda = 1.0;
  double C1 = 0.0;
  double C2 = 0.0;

  const Function& w() const { return W.valid() ? W : V; }
};

/// L_mu f(x) with f frozen at mu when it depends on the measure.
double apply_generator(const CoefficientField& field, const DiscreteMeasure& mu, const Function& f, const double* x);

struct Tolerance {
  double abs = 1e-8;
  double rel = 1e-6;
  double allow(double rhs) const { return abs + rel * std::abs(rhs); }
};

struct CheckReport {
  std::string condition;
  bool passed = true;
  double C = 0.0;
  double Lambda = 0.0;
  /// Largest lhs - rhs seen (negative when everything holds with room).
  double max_excess = -std::numeric_limits<double>::infinity();
  /// Smallest C for which the check would pass at the given Lambda.
  double best_C = -std::numeric_limits<double>::infinity();
  /// Largest Lambda for which the check would pass at the given C.
  double best_Lambda = std::numeric_limits<double>::infinity();
  double value = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  std::vector<Witness> witnesses;
  std::size_t measures = 0;
  std::size_t evaluations = 0;
  std::vector<std::string> notes;
};

/// Up to this many witnesses are kept per report.
inline constexpr std::size_t kMaxWitnesses = 16;

/// L_mu V(x) <= C - Lambda V(x) over points x (point-major, dim per point)
/// and the given measures.
CheckReport check_pointwise(const CoefficientField& field, const Function& V, double C, double Lambda,
                            const std::vector<std::vector<double>>& points, const std::vector<DiscreteMeasure>& measures,
                            Tolerance tol = {});

struct SweepReport {
  std::vector<CheckReport> entries;
  bool any_passed = false;
  bool all_failed_with_witness = true;
};

std::vector<double> default_C_sweep();
std::vector<double> default_Lambda_sweep();

SweepReport sweep_pointwise(const CoefficientField& field, const Function& V, const std::vector<double>& Cs,
                            const std::vector<double>& Lambdas, const std::vector<std::vector<double>>& points,
                            const std::vector<DiscreteMeasure>& measures, Tolerance tol = {});

/// int L_mu W(., mu) dmu <= C - Lambda int V dmu over the measure family.
CheckReport check_integral(const CoefficientField& field, const LyapunovSpec& spec,
                           const std::vector<DiscreteMeasure>& measures, Tolerance tol = {});

/// -L_mu W(0, mu) <= C1 + C2 int H dmu. With a domain, H/V <= eps is also
/// checked on the boundary shell (outer 10% of the cube).
CheckReport check_H32(const CoefficientField& field, const LyapunovSpec& spec,
                      const std::vector<DiscreteMeasure>& measures, const Cube* domain = nullptr, double eps = 0.1,
                      Tolerance tol = {});

/// int V dmu <= C / Lambda * (1 + slack).
CheckReport verify_moment_bound(const DiscreteMeasure& solution, const Function& V, double C, double Lambda,
                                double slack = 0.01);

/// `count` probability clouds of 1..max_atoms atoms, uniform in [-half_width, half_width]^d.
std::vector<DiscreteMeasure> random_clouds(int dim, std::size_t count, std::size_t max_atoms, double half_width,
                                           std::uint64_t seed);

/// One Dirac per point.
std::vector<DiscreteMeasure> dirac_family(const std::vector<std::vector<double>>& points);

/// x^2, x^2/2, 1 + x^2, x^4/4, sqrt(1 + x^2), each summed over coordinates.
std::vector<Function> independent_candidates(int dim);

}  // namespace kolmofix
