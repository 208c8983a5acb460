#include "kolmofix/function.hpp"

#include <array>
#include <optional>

#include "kolmofix/error.hpp"

namespace kolmofix {
namespace {

class FrozenExpr final : public FrozenFunction {
 public:
  FrozenExpr(Expr e, const DiscreteMeasure* mu) : expr_(substitute_measure(e, mu)) {
    if (uses_measure(expr_)) measure_ = *mu;
  }
  double value(const double* x, int dim) const override { return eval(expr_, x, dim, measure_ptr()); }
  Jet jet(const double* x, int dim) const override { return eval_jet(expr_, x, dim, measure_ptr()); }

 private:
  const DiscreteMeasure* measure_ptr() const { return measure_ ? &*measure_ : nullptr; }

  Expr expr_;
  std::optional<DiscreteMeasure> measure_;
};

class FrozenNative final : public FrozenFunction {
 public:
  explicit FrozenNative(Function::JetFn fn) : fn_(std::move(fn)) {}
  double value(const double* x, int dim) const override { return jet(x, dim).v; }
  Jet jet(const double* x, int dim) const override {
    std::array<Jet, kMaxDim> vars{};
    for (int i = 0; i < dim; ++i) vars[static_cast<std::size_t>(i)] = Jet::variable(x[i], i, dim);
    return fn_(vars.data(), dim);
  }

 private:
  Function::JetFn fn_;
};

}  // namespace

Function Function::parse(const std::string& text) {
  Function f = from_expr(parse_expr(text));
  f.text_ = text;
  return f;
}

Function Function::from_expr(Expr e) {
  Function f;
  f.measure_dependent_ = uses_measure(e);
  f.text_ = to_string(e);
  f.expr_ = e;
  f.freeze_ = [e](const DiscreteMeasure* mu) -> std::shared_ptr<const FrozenFunction> {
    if (uses_measure(e) && mu == nullptr) throw EvalError("function " + to_string(e) + " needs a measure");
    return std::make_shared<FrozenExpr>(e, mu);
  };
  return f;
}

Function Function::native(std::string name, JetFn fn) {
  Function f;
  f.text_ = std::move(name);
  auto frozen = std::make_shared<const FrozenNative>(std::move(fn));
  f.freeze_ = [frozen](const DiscreteMeasure*) -> std::shared_ptr<const FrozenFunction> { return frozen; };
  return f;
}

std::shared_ptr<const FrozenFunction> Function::freeze(const DiscreteMeasure* mu) const {
  if (!freeze_) throw EvalError("function is not set");
  return freeze_(mu);
}

double Function::operator()(const double* x, int dim, const DiscreteMeasure* mu) const {
  return freeze(mu)->value(x, dim);
}

Jet Function::jet(const double* x, int dim, const DiscreteMeasure* mu) const { return freeze(mu)->jet(x, dim); }

}  // namespace kolmofix
