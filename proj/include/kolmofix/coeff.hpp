#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "kolmofix/expr.hpp"
#include "kolmofix/function.hpp"
#include "kolmofix/jet.hpp"
#include "kolmofix/measure.hpp"

namespace kolmofix {

/// (a, b) with the measure fixed. a is d x d row-major.
class FrozenCoefficients {
 public:
  explicit FrozenCoefficients(int dim) : dim_(dim) {}
  virtual ~FrozenCoefficients() = default;

  int dim() const { return dim_; }

  virtual void at(const double* x, double* a, double* b) const = 0;

  /// xs[i] holds n values of coordinate i. a[i * d + j] and b[i] receive n
  /// values each; n <= Program::kBlock.
  virtual void block(const double* const* xs, std::size_t n, double* const* a, double* const* b) const;

  /// Off-diagonal entries of a vanish identically.
  virtual bool diagonal() const { return false; }
  /// a does not depend on x.
  virtual bool constant_diffusion() const { return false; }

  /// Generator L f = scale(x) * (a : D^2 f + b . Df) + source(x).
  virtual double scale(const double* /*x*/) const { return 1.0; }
  virtual double source(const double* /*x*/) const { return 0.0; }
  /// Solvers restrict themselves to |x| < radius().
  virtual double radius() const { return std::numeric_limits<double>::infinity(); }

  /// Throws EvalError when f does not carry derivatives in all d variables.
  double generator(const Jet& f, const double* x) const;

 private:
  int dim_;
};

class CoefficientField {
 public:
  virtual ~CoefficientField() = default;
  virtual int dim() const = 0;
  /// Non-degeneracy split: a is positive definite on the first m coordinates.
  virtual int m() const = 0;
  virtual bool measure_dependent() const = 0;
  virtual std::shared_ptr<const FrozenCoefficients> freeze(const DiscreteMeasure& sigma) const = 0;
  virtual std::string describe() const = 0;
};

using FieldPtr = std::shared_ptr<const CoefficientField>;

/// Coefficients given by expressions. Missing entries are zero; a is
/// symmetric, so only one of a[i][j], a[j][i] needs to be set.
class ExprField final : public CoefficientField {
 public:
  /// a is d x d row-major (empty string = 0), b has d entries.
  ExprField(int dim, int m, const std::vector<std::string>& a, const std::vector<std::string>& b);
  ExprField(int dim, int m, std::vector<Expr> a, std::vector<Expr> b);

  int dim() const override { return dim_; }
  int m() const override { return m_; }
  bool measure_dependent() const override { return measure_dependent_; }
  std::shared_ptr<const FrozenCoefficients> freeze(const DiscreteMeasure& sigma) const override;
  std::string describe() const override;

  /// Null for an identically zero entry.
  const Expr& a(int i, int j) const { return a_[static_cast<std::size_t>(i * dim_ + j)]; }
  const Expr& b(int i) const { return b_[static_cast<std::size_t>(i)]; }

 private:
  void validate();

  int dim_;
  int m_;
  std::vector<Expr> a_;
  std::vector<Expr> b_;
  bool measure_dependent_ = false;
};

struct MollifierKernel {
  enum class Kind { box, triangular, quartic };
  Kind kind = Kind::box;
  double delta = 0.5;
  /// Midpoint nodes per convolved dimension.
  int nodes = 64;
};

MollifierKernel::Kind parse_kernel_kind(const std::string& name);
/// Un-scaled 1-D profile h(t), supported in |t| < 1 with unit integral.
double kernel_profile(MollifierKernel::Kind kind, double t);

/// y-convolution of a and b with h_delta. For m = 0 the field is returned
/// unchanged and `warning` (if given) is set.
FieldPtr mollify(const FieldPtr& field, const MollifierKernel& kernel, std::string* warning = nullptr);

struct Cube {
  std::vector<double> lower;
  std::vector<double> upper;
  int dim() const { return static_cast<int>(lower.size()); }
  double diameter() const;
};

struct Witness {
  std::vector<double> x;
  std::size_t measure = 0;
  double value = 0.0;
  std::string what;
};

struct AssumptionReport {
  std::string condition;
  bool passed = false;
  double lambda_est = std::numeric_limits<double>::quiet_NaN();
  double sup_bound_est = std::numeric_limits<double>::quiet_NaN();
  /// (distance, monotone envelope of the coefficient gap), increasing distance.
  std::vector<std::pair<double, double>> modulus_samples;
  std::vector<Witness> violations;
  std::vector<std::string> notes;
  std::size_t evaluations = 0;
};

/// Grid of `resolution` nodes per axis, endpoints included.
std::vector<std::vector<double>> cube_nodes(const Cube& K, int resolution);

AssumptionReport check_H11(const CoefficientField& field, const Cube& K, const std::vector<DiscreteMeasure>& measures,
                           int resolution, double tol = 1e-10);
AssumptionReport check_H12(const CoefficientField& field, const Cube& K, const std::vector<DiscreteMeasure>& measures,
                           int resolution);
AssumptionReport check_H13(const CoefficientField& field, const Cube& K, const std::vector<DiscreteMeasure>& measures,
                           std::size_t pair_budget, std::uint64_t seed = 1);

}  // namespace kolmofix
