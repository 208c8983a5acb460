#pragma once

#include <functional>
#include <memory>
#include <string>

#include "kolmofix/expr.hpp"
#include "kolmofix/jet.hpp"
#include "kolmofix/measure.hpp"

namespace kolmofix {

/// A function of x alone, with the measure (if any) already fixed.
class FrozenFunction {
 public:
  virtual ~FrozenFunction() = default;
  virtual double value(const double* x, int dim) const = 0;
  virtual Jet jet(const double* x, int dim) const = 0;
};

/// Scalar function f(x, mu) with x-derivatives up to second order.
class Function {
 public:
  using JetFn = std::function<Jet(const Jet* x, int dim)>;

  Function() = default;

  static Function parse(const std::string& text);
  static Function from_expr(Expr e);
  /// Measure-independent function defined on jets.
  static Function native(std::string name, JetFn fn);

  bool valid() const { return static_cast<bool>(freeze_); }
  bool measure_dependent() const { return measure_dependent_; }
  const std::string& text() const { return text_; }
  const Expr& expr() const { return expr_; }

  /// `mu` may be null for measure-independent functions.
  std::shared_ptr<const FrozenFunction> freeze(const DiscreteMeasure* mu) const;

  double operator()(const double* x, int dim, const DiscreteMeasure* mu = nullptr) const;
  Jet jet(const double* x, int dim, const DiscreteMeasure* mu = nullptr) const;

 private:
  std::function<std::shared_ptr<const FrozenFunction>(const DiscreteMeasure*)> freeze_;
  bool measure_dependent_ = false;
  std::string text_;
  Expr expr_;
};

}  // namespace kolmofix
