#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kolmofix/error.hpp"
#include "kolmofix/expr.hpp"

namespace kolmofix {
namespace {

struct Unsupported : std::exception {};

}  // namespace

std::optional<Program> Program::compile(const Expr& e) {
  Program p;
  if (e->op == Op::constant) {
    p.constant_ = e->value;
  }
  try {
    p.emit(*e);
  } catch (const Unsupported&) {
    return std::nullopt;
  }
  return p;
}

void Program::emit(const Node& n) {
  auto push = [&](Ins ins) {
    code_.push_back(ins);
    ++depth_;
    max_depth_ = std::max(max_depth_, depth_);
  };
  auto op = [&](Code c, int pops) {
    code_.push_back({c});
    depth_ -= pops;
  };
  switch (n.op) {
    case Op::constant: push({Code::push_const, 0, n.value}); return;
    case Op::coord: push({Code::push_coord, n.index, 0.0}); return;
    case Op::ycoord:
    case Op::mom:
    case Op::integral: throw Unsupported{};
    case Op::pow:
      emit(*n.args[0]);
      if (n.args[1]->op == Op::constant && n.args[1]->value == 2.0) {
        op(Code::square, 0);
        return;
      }
      if (n.args[1]->op == Op::constant && n.args[1]->value == 3.0) {
        op(Code::cube, 0);
        return;
      }
      emit(*n.args[1]);
      op(Code::pow, 1);
      return;
    default: break;
  }
  for (const Expr& a : n.args) emit(*a);
  switch (n.op) {
    case Op::add: op(Code::add, 1); break;
    case Op::sub: op(Code::sub, 1); break;
    case Op::mul: op(Code::mul, 1); break;
    case Op::div: op(Code::div, 1); break;
    case Op::min: op(Code::min, 1); break;
    case Op::max: op(Code::max, 1); break;
    case Op::neg: op(Code::neg, 0); break;
    case Op::abs: op(Code::abs, 0); break;
    case Op::sqrt: op(Code::sqrt, 0); break;
    case Op::exp: op(Code::exp, 0); break;
    case Op::log: op(Code::log, 0); break;
    case Op::sin: op(Code::sin, 0); break;
    case Op::cos: op(Code::cos, 0); break;
    case Op::ind: {
      static const Code codes[] = {Code::ind_ge, Code::ind_le, Code::ind_gt, Code::ind_lt};
      op(codes[static_cast<int>(n.cmp)], 1);
      break;
    }
    default: throw Unsupported{};
  }
}

void Program::run(const double* const* coords, std::size_t n, double* out) const {
  if (constant_) {
    std::fill(out, out + n, *constant_);
    return;
  }
  thread_local std::vector<double> scratch;
  const std::size_t need = static_cast<std::size_t>(max_depth_) * kBlock;
  if (scratch.size() < need) scratch.resize(need);
  double* base = scratch.data();
  int top = -1;
  auto slot = [&](int s) { return base + static_cast<std::size_t>(s) * kBlock; };
  for (const Ins& ins : code_) {
    switch (ins.code) {
      case Code::push_const: {
        double* d = slot(++top);
        std::fill(d, d + n, ins.c);
        break;
      }
      case Code::push_coord: {
        double* d = slot(++top);
        std::copy(coords[ins.index], coords[ins.index] + n, d);
        break;
      }
      case Code::add: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) a[i] = a[i] + b[i];
        break;
      }
      case Code::sub: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) a[i] = a[i] - b[i];
        break;
      }
      case Code::mul: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) a[i] = a[i] * b[i];
        break;
      }
      case Code::div: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) {
          if (b[i] == 0.0) throw EvalError("division by zero");
        }
        for (std::size_t i = 0; i < n; ++i) a[i] = a[i] / b[i];
        break;
      }
      case Code::pow: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::pow(a[i], b[i]);
        break;
      }
      case Code::min: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) a[i] = b[i] < a[i] ? b[i] : a[i];
        break;
      }
      case Code::max: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) a[i] = b[i] > a[i] ? b[i] : a[i];
        break;
      }
      case Code::ind_ge:
      case Code::ind_le:
      case Code::ind_gt:
      case Code::ind_lt: {
        double* a = slot(top - 1);
        const double* b = slot(top--);
        for (std::size_t i = 0; i < n; ++i) {
          bool t = false;
          switch (ins.code) {
            case Code::ind_ge: t = a[i] >= b[i]; break;
            case Code::ind_le: t = a[i] <= b[i]; break;
            case Code::ind_gt: t = a[i] > b[i]; break;
            default: t = a[i] < b[i]; break;
          }
          a[i] = t ? 1.0 : 0.0;
        }
        break;
      }
      case Code::square: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = a[i] * a[i];
        break;
      }
      case Code::cube: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = a[i] * a[i] * a[i];
        break;
      }
      case Code::neg: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = -a[i];
        break;
      }
      case Code::abs: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(a[i]);
        break;
      }
      case Code::sqrt: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::sqrt(a[i]);
        break;
      }
      case Code::exp: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::exp(a[i]);
        break;
      }
      case Code::log: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::log(a[i]);
        break;
      }
      case Code::sin: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::sin(a[i]);
        break;
      }
      case Code::cos: {
        double* a = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::cos(a[i]);
        break;
      }
    }
  }
  const double* r = slot(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(r[i])) throw EvalError("coefficient is not finite at a block point");
    out[i] = r[i];
  }
}

}  // namespace kolmofix
