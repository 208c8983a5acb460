#pragma once

// Coefficient expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?            right associative
//   primary := number | 'pi' | x<i> | y<i> | call | '(' expr ')'
//   call    := abs|sqrt|exp|log|sin|cos '(' expr ')'
//            | min|max '(' expr ',' expr ')'
//            | IND '(' expr cmp expr ')'          cmp is >=, <=, > or <
//            | MOM '(' number ',' abs|radial|c<i> ')'
//            | INT '(' expr ')'
//
// x<i> is the 1-based state coordinate. MOM(p, kind) is a moment of the
// measure; INT(e) integrates e over the measure with y<i> the integration
// variable. y may appear only inside INT, and INT/MOM do not nest.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kolmofix/jet.hpp"
#include "kolmofix/measure.hpp"

namespace kolmofix {

enum class Op {
  constant,
  coord,
  ycoord,
  add,
  sub,
  mul,
  div,
  pow,
  neg,
  abs,
  sqrt,
  exp,
  log,
  sin,
  cos,
  min,
  max,
  ind,
  mom,
  integral,
};

enum class Cmp { ge, le, gt, lt };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::constant;
  double value = 0.0;  // constant value, or moment order
  int index = 0;       // zero-based coordinate
  Cmp cmp = Cmp::ge;
  MomentSpec moment{};
  std::vector<Expr> args;
};

Expr parse_expr(const std::string& text);
std::string to_string(const Expr& e);
bool equal(const Expr& a, const Expr& b);

Expr make_constant(double c);

bool uses_measure(const Expr& e);
bool uses_x(const Expr& e);
/// Largest zero-based x index referenced, or -1.
int max_coord(const Expr& e);

/// Replaces MOM nodes and x-free INT nodes with their values under `mu`
/// (required when the expression uses the measure), then folds constants.
/// INT nodes whose integrand depends on x are kept.
Expr substitute_measure(const Expr& e, const DiscreteMeasure* mu);

/// Evaluation of an expression whose remaining INT nodes (if any) are
/// integrated against `mu`. Throws EvalError on division by zero or a
/// non-finite result.
double eval(const Expr& e, const double* x, int dim, const DiscreteMeasure* mu = nullptr);
Jet eval_jet(const Expr& e, const double* x, int dim, const DiscreteMeasure* mu = nullptr);

/// Straight-line bytecode for measure-free expressions, evaluated over blocks
/// of points held coordinate-major.
class Program {
 public:
  static constexpr std::size_t kBlock = 256;

  /// Empty when the expression still references the measure.
  static std::optional<Program> compile(const Expr& e);

  /// coords[i] points at n values of coordinate i; n <= kBlock.
  void run(const double* const* coords, std::size_t n, double* out) const;

  bool is_constant() const { return constant_.has_value(); }
  double constant_value() const { return *constant_; }

 private:
  enum class Code : std::uint8_t {
    push_const,
    push_coord,
    add,
    sub,
    mul,
    div,
    pow,
    square,
    cube,
    neg,
    abs,
    sqrt,
    exp,
    log,
    sin,
    cos,
    min,
    max,
    ind_ge,
    ind_le,
    ind_gt,
    ind_lt,
  };
  struct Ins {
    Code code;
    int index = 0;
    double c = 0.0;
  };
  void emit(const Node& n);

  std::vector<Ins> code_;
  int depth_ = 0;
  int max_depth_ = 0;
  std::optional<double> constant_;
};

}  // namespace kolmofix
