#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kolmofix {

class Function;

/// Weighted atoms in R^d; a sub-probability measure. Coordinates are stored
/// point-major: coords()[k * dim + i] is coordinate i of atom k.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights);

  static DiscreteMeasure dirac(const std::vector<double>& point);
  /// Equal-weight atoms; `points` is point-major.
  static DiscreteMeasure uniform(int dim, std::vector<double> points);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  const double* point(std::size_t k) const { return coords_.data() + k * static_cast<std::size_t>(dim_); }
  double coord(std::size_t k, int i) const { return coords_[k * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i)]; }
  double weight(std::size_t k) const { return weights_[k]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& weights() const { return weights_; }

  double mass() const;
  /// Throws MeasureError unless |mass - 1| <= tol.
  void require_probability(double tol = 1e-12) const;

 private:
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  int cells = 1;

  double width() const { return (upper - lower) / cells; }
  double center(int i) const { return lower + (i + 0.5) * width(); }
};

/// Cell-averaged density on a tensor grid; values are row-major with the
/// first axis slowest.
class GridDensity {
 public:
  GridDensity() = default;
  GridDensity(std::vector<Axis> axes, std::vector<double> values);

  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t cells() const { return values_.size(); }
  double cell_volume() const;
  double mass() const;
  void require_probability(double tol = 1e-9) const;
  /// Cell centre of flat index `c`.
  void center(std::size_t c, double* x) const;
  /// Midpoint rule: one atom per cell with weight value * volume.
  DiscreteMeasure to_measure(bool drop_zero = false) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
};

enum class MomentKind { abs, radial, component };

/// abs: sum_i |x_i|^p; radial: |x|^p; component: x_i^p (integer p).
struct MomentSpec {
  MomentKind kind = MomentKind::abs;
  int component = 0;  // zero-based, component kind only
};

double moment(const DiscreteMeasure& mu, double p, MomentSpec spec = {});
double moment(const GridDensity& mu, double p, MomentSpec spec = {});
double moment_term(const double* x, int dim, double p, MomentSpec spec);

/// Mean of coordinate i.
double mean(const DiscreteMeasure& mu, int i = 0);

/// Throws EvalError naming the atom when V is not finite there.
double lyapunov_integral(const DiscreteMeasure& mu, const Function& V);
bool in_PR(const DiscreteMeasure& mu, const Function& V, double R);

/// Exact p-Wasserstein distance between 1-D probability measures.
double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p = 1.0);

/// Fixed-point stopping metric: max marginal W1 plus the V-moment gap
/// (V may be null).
double measure_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Function* V);

double v_weak_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const std::vector<Function>& battery);

/// Smooth cutoff equal to 1 on B_n and 0 outside B_{n+1}.
double cutoff(int n, double radius);

struct TruncationScheme {
  int n = 8;
  double Lambda = 1.0;
  /// false selects the sub-probability variant (no compensating atom).
  bool compensate = true;
  double phi(const double* x, int dim) const;
};

/// nu = phi_n mu + (1 - I) delta_0, or phi_n mu without the atom.
DiscreteMeasure compensate_truncate(const DiscreteMeasure& mu, const TruncationScheme& scheme);

/// Smooth plateau: 1 on [lo, hi] per coordinate, 0 outside [lo - ramp, hi + ramp].
struct SmoothWindow {
  std::vector<double> lo;
  std::vector<double> hi;
  double ramp = 1.0;
  double operator()(const double* z, int dim) const;
};

struct ProjectionWindow {
  int m = 1;
  SmoothWindow eta;              // acts on z = (x_{m+1}, ..., x_d)
  std::vector<double> ky_lower;  // K_y
  std::vector<double> ky_upper;
  std::vector<double> qy_lower;  // Q_y
  std::vector<double> qy_upper;
  double r = 2.0;
  double S = 10.0;
};

/// First m coordinates with weights multiplied by eta(z). The result may
/// have zero mass.
DiscreteMeasure project_y(const DiscreteMeasure& mu, const ProjectionWindow& window);

double silverman_bandwidth(const DiscreteMeasure& mu_y);

/// (int_{K_y} rho^r)^{1/r} for the Gaussian-kernel estimate rho. A
/// non-positive bandwidth selects Silverman's rule.
double kde_lr_norm(const DiscreteMeasure& mu_y, const std::vector<double>& ky_lower,
                   const std::vector<double>& ky_upper, double r, double bandwidth);

/// Concatenation with scaled weights; coincident atoms are merged.
DiscreteMeasure mixture(const DiscreteMeasure& a, double wa, const DiscreteMeasure& b, double wb);

/// Merges atoms with identical coordinates (exact comparison).
DiscreteMeasure merge_duplicates(const DiscreteMeasure& mu);

/// Mass- and mean-preserving reduction to at most `max_atoms` atoms. 1-D:
/// equal-mass quantile bins replaced by their barycentres; d >= 2: grid-cell
/// barycentres.
DiscreteMeasure compress(const DiscreteMeasure& mu, std::size_t max_atoms);

/// Drops atoms of zero weight.
DiscreteMeasure drop_zero_weights(const DiscreteMeasure& mu);

/// Counter-based normal sample with mean and standard deviation per
/// coordinate; reproducible for a given seed.
DiscreteMeasure gaussian_sample(int dim, std::size_t n, double mean, double sd, std::uint64_t seed);

/// Product Gaussian evaluated at cell centres and normalised to mass 1.
GridDensity gaussian_grid(const std::vector<Axis>& axes, double mean, double sd);

/// Histogram masses of a 1-D measure on `bins` equal cells of [lower, upper];
/// mass outside is dropped.
std::vector<double> histogram_1d(const DiscreteMeasure& mu, double lower, double upper, int bins);
/// Same bins for a 1-D grid density; each cell's mass is split by overlap.
std::vector<double> histogram_1d(const GridDensity& g, double lower, double upper, int bins);

/// Pairwise deterministic sum of `terms`.
double reduce_sum(const std::vector<double>& terms);

}  // namespace kolmofix
