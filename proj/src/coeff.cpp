#include "kolmofix/coeff.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "kolmofix/error.hpp"

namespace kolmofix {

void FrozenCoefficients::block(const double* const* xs, std::size_t n, double* const* a, double* const* b) const {
  const int d = dim_;
  std::array<double, kMaxDim> x{};
  std::array<double, kMaxDim * kMaxDim> av{};
  std::array<double, kMaxDim> bv{};
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = xs[i][k];
    at(x.data(), av.data(), bv.data());
    for (int i = 0; i < d * d; ++i) a[i][k] = av[static_cast<std::size_t>(i)];
    for (int i = 0; i < d; ++i) b[i][k] = bv[static_cast<std::size_t>(i)];
  }
}

double FrozenCoefficients::generator(const Jet& f, const double* x) const {
  const int d = dim_;
  if (f.n < d) throw EvalError("test function does not provide derivatives in all " + std::to_string(d) + " variables");
  std::array<double, kMaxDim * kMaxDim> a{};
  std::array<double, kMaxDim> b{};
  at(x, a.data(), b.data());
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) s += a[static_cast<std::size_t>(i * d + j)] * f.hess(i, j);
  }
  for (int i = 0; i < d; ++i) s += b[static_cast<std::size_t>(i)] * f.grad(i);
  return scale(x) * s + source(x);
}

namespace {

class FrozenExprField final : public FrozenCoefficients {
 public:
  FrozenExprField(const ExprField& field, const DiscreteMeasure* sigma) : FrozenCoefficients(field.dim()) {
    const int d = field.dim();
    a_.resize(static_cast<std::size_t>(d * d));
    b_.resize(static_cast<std::size_t>(d));
    bool need_measure = false;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const Expr& e = field.a(i, j);
        a_[static_cast<std::size_t>(i * d + j)] = e ? substitute_measure(e, sigma) : make_constant(0.0);
      }
      const Expr& e = field.b(i);
      b_[static_cast<std::size_t>(i)] = e ? substitute_measure(e, sigma) : make_constant(0.0);
    }
    for (const Expr& e : a_) need_measure = need_measure || uses_measure(e);
    for (const Expr& e : b_) need_measure = need_measure || uses_measure(e);
    if (need_measure) sigma_ = *sigma;

    compiled_ = true;
    for (const Expr& e : a_) {
      auto p = Program::compile(e);
      compiled_ = compiled_ && p.has_value();
      if (p) a_prog_.push_back(std::move(*p));
    }
    for (const Expr& e : b_) {
      auto p = Program::compile(e);
      compiled_ = compiled_ && p.has_value();
      if (p) b_prog_.push_back(std::move(*p));
    }
    diagonal_ = true;
    constant_ = true;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const Expr& e = a_[static_cast<std::size_t>(i * d + j)];
        if (i != j) diagonal_ = diagonal_ && e->op == Op::constant && e->value == 0.0;
        constant_ = constant_ && e->op == Op::constant;
      }
    }
  }

  void at(const double* x, double* a, double* b) const override {
    const int d = dim();
    const DiscreteMeasure* mu = sigma_ ? &*sigma_ : nullptr;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        const double v = eval(a_[static_cast<std::size_t>(i * d + j)], x, d, mu);
        a[i * d + j] = v;
        a[j * d + i] = v;
      }
      b[i] = eval(b_[static_cast<std::size_t>(i)], x, d, mu);
    }
  }

  void block(const double* const* xs, std::size_t n, double* const* a, double* const* b) const override {
    if (!compiled_) {
      FrozenCoefficients::block(xs, n, a, b);
      return;
    }
    const int d = dim();
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        a_prog_[static_cast<std::size_t>(i * d + j)].run(xs, n, a[i * d + j]);
        if (j != i) std::copy(a[i * d + j], a[i * d + j] + n, a[j * d + i]);
      }
      b_prog_[static_cast<std::size_t>(i)].run(xs, n, b[i]);
    }
  }

  bool diagonal() const override { return diagonal_; }
  bool constant_diffusion() const override { return constant_; }

 private:
  std::vector<Expr> a_;
  std::vector<Expr> b_;
  std::vector<Program> a_prog_;
  std::vector<Program> b_prog_;
  std::optional<DiscreteMeasure> sigma_;
  bool compiled_ = false;
  bool diagonal_ = false;
  bool constant_ = false;
};

Expr parse_or_null(const std::string& s) {
  if (s.empty()) return nullptr;
  return parse_expr(s);
}

}  // namespace

ExprField::ExprField(int dim, int m, const std::vector<std::string>& a, const std::vector<std::string>& b)
    : dim_(dim), m_(m) {
  if (a.size() != static_cast<std::size_t>(dim * dim) || b.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError("coefficient field needs d*d diffusion entries and d drift entries");
  }
  for (const std::string& s : a) a_.push_back(parse_or_null(s));
  for (const std::string& s : b) b_.push_back(parse_or_null(s));
  validate();
}

ExprField::ExprField(int dim, int m, std::vector<Expr> a, std::vector<Expr> b)
    : dim_(dim), m_(m), a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != static_cast<std::size_t>(dim * dim) || b_.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError("coefficient field needs d*d diffusion entries and d drift entries");
  }
  validate();
}

void ExprField::validate() {
  if (dim_ < 1 || dim_ > kMaxDim) throw ConfigError("dimension must be between 1 and " + std::to_string(kMaxDim));
  if (m_ < 0 || m_ > dim_) throw ConfigError("split m must satisfy 0 <= m <= d");
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      Expr& up = a_[static_cast<std::size_t>(i * dim_ + j)];
      Expr& lo = a_[static_cast<std::size_t>(j * dim_ + i)];
      if (up && lo && !equal(up, lo)) {
        throw ConfigError("a[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] and a[" +
                          std::to_string(j + 1) + "][" + std::to_string(i + 1) + "] differ; a must be symmetric");
      }
      if (!up) up = lo;
      if (!lo) lo = up;
    }
  }
  auto check = [&](const Expr& e) {
    if (!e) return;
    if (max_coord(e) >= dim_) throw ConfigError("coefficient " + to_string(e) + " uses a coordinate beyond d");
    measure_dependent_ = measure_dependent_ || uses_measure(e);
  };
  for (const Expr& e : a_) check(e);
  for (const Expr& e : b_) check(e);
}

std::shared_ptr<const FrozenCoefficients> ExprField::freeze(const DiscreteMeasure& sigma) const {
  if (measure_dependent_ && sigma.dim() != dim_) throw MeasureError("frozen measure has the wrong dimension");
  return std::make_shared<FrozenExprField>(*this, &sigma);
}

std::string ExprField::describe() const {
  std::ostringstream os;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      const Expr& e = a(i, j);
      if (e) os << "a[" << i + 1 << "][" << j + 1 << "] = " << to_string(e) << "; ";
    }
  }
  for (int i = 0; i < dim_; ++i) {
    if (b(i)) os << "b[" << i + 1 << "] = " << to_string(b(i)) << "; ";
  }
  os << "m = " << m_;
  return os.str();
}

double Cube::diameter() const {
  double s = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i) s += (upper[i] - lower[i]) * (upper[i] - lower[i]);
  return std::sqrt(s);
}

std::vector<std::vector<double>> cube_nodes(const Cube& K, int resolution) {
  const int d = K.dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(resolution);
  std::vector<std::vector<double>> pts;
  pts.reserve(total);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> x(static_cast<std::size_t>(d));
    std::size_t rest = c;
    for (int i = d - 1; i >= 0; --i) {
      const auto r = static_cast<std::size_t>(resolution);
      const double t = resolution == 1 ? 0.5 : static_cast<double>(rest % r) / (resolution - 1);
      x[static_cast<std::size_t>(i)] = K.lower[static_cast<std::size_t>(i)] +
                                       t * (K.upper[static_cast<std::size_t>(i)] - K.lower[static_cast<std::size_t>(i)]);
      rest /= r;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace kolmofix
