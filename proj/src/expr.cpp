#include "kolmofix/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <type_traits>

#include "kolmofix/error.hpp"

namespace kolmofix {
namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, ge, le, gt, lt, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= s_.size()) return t;
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      t.number = std::strtod(begin, &end);
      const auto len = static_cast<std::size_t>(end - begin);
      t.kind = Tok::number;
      t.text = s_.substr(pos_, len);
      advance(len);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t len = 0;
      while (pos_ + len < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_ + len])) || s_[pos_ + len] == '_')) {
        ++len;
      }
      t.kind = Tok::ident;
      t.text = s_.substr(pos_, len);
      advance(len);
      return t;
    }
    const char d = pos_ + 1 < s_.size() ? s_[pos_ + 1] : '\0';
    std::size_t len = 1;
    switch (c) {
      case '+': t.kind = Tok::plus; break;
      case '-': t.kind = Tok::minus; break;
      case '*': t.kind = Tok::star; break;
      case '/': t.kind = Tok::slash; break;
      case '^': t.kind = Tok::caret; break;
      case '(': t.kind = Tok::lparen; break;
      case ')': t.kind = Tok::rparen; break;
      case ',': t.kind = Tok::comma; break;
      case '>':
        t.kind = d == '=' ? Tok::ge : Tok::gt;
        len = d == '=' ? 2 : 1;
        break;
      case '<':
        t.kind = d == '=' ? Tok::le : Tok::lt;
        len = d == '=' ? 2 : 1;
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }
    t.text = s_.substr(pos_, len);
    advance(len);
    return t;
  }

 private:
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance(1);
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::shared_ptr<Node> node(Op op, std::vector<Expr> args = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { cur_ = lex_.next(); }

  Expr parse() {
    Expr e = expr();
    if (cur_.kind != Tok::end) fail("unexpected '" + cur_.text + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur_.line, cur_.column); }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k) fail(std::string("expected ") + what);
    cur_ = lex_.next();
  }

  Expr expr() {
    Expr lhs = term();
    while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
      const Op op = cur_.kind == Tok::plus ? Op::add : Op::sub;
      cur_ = lex_.next();
      lhs = node(op, {lhs, term()});
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
      const Op op = cur_.kind == Tok::star ? Op::mul : Op::div;
      cur_ = lex_.next();
      lhs = node(op, {lhs, unary()});
    }
    return lhs;
  }

  Expr unary() {
    if (cur_.kind == Tok::minus) {
      cur_ = lex_.next();
      return node(Op::neg, {unary()});
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (cur_.kind == Tok::caret) {
      cur_ = lex_.next();
      return node(Op::pow, {base, unary()});
    }
    return base;
  }

  static bool indexed(const std::string& id, char prefix, int& index) {
    if (id.size() < 2 || id[0] != prefix) return false;
    for (std::size_t i = 1; i < id.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    }
    index = std::atoi(id.c_str() + 1);
    return true;
  }

  Expr primary() {
    if (cur_.kind == Tok::number) {
      auto n = node(Op::constant);
      n->value = cur_.number;
      cur_ = lex_.next();
      return n;
    }
    if (cur_.kind == Tok::lparen) {
      cur_ = lex_.next();
      Expr e = expr();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (cur_.kind != Tok::ident) fail(cur_.kind == Tok::end ? "unexpected end of expression" : "unexpected '" + cur_.text + "'");
    const Token id = cur_;
    cur_ = lex_.next();
    int index = 0;
    if (id.text == "pi") {
      auto n = node(Op::constant);
      n->value = M_PI;
      return n;
    }
    if (indexed(id.text, 'x', index)) {
      if (index < 1 || index > kMaxDim) throw ParseError("coordinate " + id.text + " out of range x1..x4", id.line, id.column);
      auto n = node(Op::coord);
      n->index = index - 1;
      return n;
    }
    if (indexed(id.text, 'y', index)) {
      if (!in_integral_) throw ParseError(id.text + " is only allowed inside INT(...)", id.line, id.column);
      if (index < 1 || index > kMaxDim) throw ParseError("coordinate " + id.text + " out of range y1..y4", id.line, id.column);
      auto n = node(Op::ycoord);
      n->index = index - 1;
      return n;
    }
    static const std::pair<const char*, Op> unary_fns[] = {{"abs", Op::abs}, {"sqrt", Op::sqrt}, {"exp", Op::exp},
                                                            {"log", Op::log}, {"sin", Op::sin},   {"cos", Op::cos}};
    for (const auto& [name, op] : unary_fns) {
      if (id.text == name) {
        expect(Tok::lparen, "'('");
        Expr a = expr();
        expect(Tok::rparen, "')'");
        return node(op, {a});
      }
    }
    if (id.text == "min" || id.text == "max") {
      expect(Tok::lparen, "'('");
      Expr a = expr();
      expect(Tok::comma, "','");
      Expr b = expr();
      expect(Tok::rparen, "')'");
      return node(id.text == "min" ? Op::min : Op::max, {a, b});
    }
    if (id.text == "IND") {
      expect(Tok::lparen, "'('");
      Expr a = expr();
      Cmp cmp = Cmp::ge;
      switch (cur_.kind) {
        case Tok::ge: cmp = Cmp::ge; break;
        case Tok::le: cmp = Cmp::le; break;
        case Tok::gt: cmp = Cmp::gt; break;
        case Tok::lt: cmp = Cmp::lt; break;
        default: fail("expected a comparison (>=, <=, >, <) in IND");
      }
      cur_ = lex_.next();
      Expr b = expr();
      expect(Tok::rparen, "')'");
      auto n = node(Op::ind, {a, b});
      n->cmp = cmp;
      return n;
    }
    if (id.text == "MOM") {
      if (in_integral_) throw ParseError("MOM cannot appear inside INT", id.line, id.column);
      expect(Tok::lparen, "'('");
      if (cur_.kind != Tok::number) fail("MOM order must be a number");
      auto n = node(Op::mom);
      n->value = cur_.number;
      cur_ = lex_.next();
      expect(Tok::comma, "','");
      if (cur_.kind != Tok::ident) fail("expected abs, radial or c<i> in MOM");
      int comp = 0;
      if (cur_.text == "abs") {
        n->moment.kind = MomentKind::abs;
      } else if (cur_.text == "radial") {
        n->moment.kind = MomentKind::radial;
      } else if (indexed(cur_.text, 'c', comp) && comp >= 1 && comp <= kMaxDim) {
        n->moment.kind = MomentKind::component;
        n->moment.component = comp - 1;
        if (n->value != std::floor(n->value)) fail("component moments need an integer order");
      } else {
        fail("unknown moment kind '" + cur_.text + "'");
      }
      cur_ = lex_.next();
      expect(Tok::rparen, "')'");
      return n;
    }
    if (id.text == "INT") {
      if (in_integral_) throw ParseError("INT cannot be nested", id.line, id.column);
      expect(Tok::lparen, "'('");
      in_integral_ = true;
      Expr body = expr();
      in_integral_ = false;
      expect(Tok::rparen, "')'");
      return node(Op::integral, {body});
    }
    throw ParseError("unknown identifier '" + id.text + "'", id.line, id.column);
  }

  Lexer lex_;
  Token cur_;
  bool in_integral_ = false;
};

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void print(const Node& n, std::ostringstream& os) {
  auto binary = [&](const char* op) {
    os << '(';
    print(*n.args[0], os);
    os << ' ' << op << ' ';
    print(*n.args[1], os);
    os << ')';
  };
  auto call = [&](const char* name) {
    os << name << '(';
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i) os << ", ";
      print(*n.args[i], os);
    }
    os << ')';
  };
  switch (n.op) {
    case Op::constant:
      if (n.value < 0.0) {
        os << "(-" << number_text(-n.value) << ')';
      } else {
        os << number_text(n.value);
      }
      break;
    case Op::coord: os << 'x' << n.index + 1; break;
    case Op::ycoord: os << 'y' << n.index + 1; break;
    case Op::add: binary("+"); break;
    case Op::sub: binary("-"); break;
    case Op::mul: binary("*"); break;
    case Op::div: binary("/"); break;
    case Op::pow: binary("^"); break;
    case Op::neg:
      os << "(-";
      print(*n.args[0], os);
      os << ')';
      break;
    case Op::abs: call("abs"); break;
    case Op::sqrt: call("sqrt"); break;
    case Op::exp: call("exp"); break;
    case Op::log: call("log"); break;
    case Op::sin: call("sin"); break;
    case Op::cos: call("cos"); break;
    case Op::min: call("min"); break;
    case Op::max: call("max"); break;
    case Op::ind: {
      static const char* names[] = {">=", "<=", ">", "<"};
      os << "IND(";
      print(*n.args[0], os);
      os << ' ' << names[static_cast<int>(n.cmp)] << ' ';
      print(*n.args[1], os);
      os << ')';
      break;
    }
    case Op::mom:
      os << "MOM(" << number_text(n.value) << ", ";
      if (n.moment.kind == MomentKind::abs) os << "abs";
      if (n.moment.kind == MomentKind::radial) os << "radial";
      if (n.moment.kind == MomentKind::component) os << 'c' << n.moment.component + 1;
      os << ')';
      break;
    case Op::integral: call("INT"); break;
  }
}

inline double value_of(double v) { return v; }
inline double value_of(const Jet& j) { return j.v; }

bool compare(Cmp cmp, double a, double b) {
  switch (cmp) {
    case Cmp::ge: return a >= b;
    case Cmp::le: return a <= b;
    case Cmp::gt: return a > b;
    case Cmp::lt: return a < b;
  }
  return false;
}

template <class T>
class Evaluator {
 public:
  Evaluator(const double* x, int dim, const DiscreteMeasure* mu) : x_(x), dim_(dim), mu_(mu) {
    if constexpr (std::is_same_v<T, Jet>) {
      for (int i = 0; i < dim; ++i) vars_[static_cast<std::size_t>(i)] = Jet::variable(x[i], i, dim);
    }
  }

  T run(const Node& n) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    switch (n.op) {
      case Op::constant: return cst(n.value);
      case Op::coord:
        if (n.index >= dim_) throw EvalError("x" + std::to_string(n.index + 1) + " used in a " + std::to_string(dim_) + "-D problem");
        if constexpr (std::is_same_v<T, Jet>) {
          return vars_[static_cast<std::size_t>(n.index)];
        } else {
          return x_[n.index];
        }
      case Op::ycoord:
        if (y_ == nullptr) throw EvalError("y coordinate outside INT");
        if (n.index >= dim_) throw EvalError("y" + std::to_string(n.index + 1) + " used in a " + std::to_string(dim_) + "-D problem");
        return cst(y_[n.index]);
      case Op::add: return run(*n.args[0]) + run(*n.args[1]);
      case Op::sub: return run(*n.args[0]) - run(*n.args[1]);
      case Op::mul: return run(*n.args[0]) * run(*n.args[1]);
      case Op::div: {
        const T num = run(*n.args[0]);
        const T den = run(*n.args[1]);
        if (value_of(den) == 0.0) throw EvalError("division by zero");
        return num / den;
      }
      case Op::pow: return power(n);
      case Op::neg: return -run(*n.args[0]);
      case Op::abs: return abs(run(*n.args[0]));
      case Op::sqrt: return sqrt(run(*n.args[0]));
      case Op::exp: return exp(run(*n.args[0]));
      case Op::log: return log(run(*n.args[0]));
      case Op::sin: return sin(run(*n.args[0]));
      case Op::cos: return cos(run(*n.args[0]));
      case Op::min: {
        T a = run(*n.args[0]);
        T b = run(*n.args[1]);
        return value_of(b) < value_of(a) ? b : a;
      }
      case Op::max: {
        T a = run(*n.args[0]);
        T b = run(*n.args[1]);
        return value_of(b) > value_of(a) ? b : a;
      }
      case Op::ind:
        return cst(compare(n.cmp, value_of(run(*n.args[0])), value_of(run(*n.args[1]))) ? 1.0 : 0.0);
      case Op::mom:
        if (mu_ == nullptr) throw EvalError("MOM needs a measure");
        return cst(moment(*mu_, n.value, n.moment));
      case Op::integral: {
        if (mu_ == nullptr) throw EvalError("INT needs a measure");
        T acc = cst(0.0);
        const double* saved = y_;
        for (std::size_t k = 0; k < mu_->size(); ++k) {
          if (mu_->weight(k) == 0.0) continue;
          y_ = mu_->point(k);
          acc = acc + scaled(mu_->weight(k), run(*n.args[0]));
        }
        y_ = saved;
        return acc;
      }
    }
    return cst(0.0);
  }

  /// Evaluates an integrand at integration point y.
  T run_at(const Node& n, const double* y) {
    const double* saved = y_;
    y_ = y;
    T v = run(n);
    y_ = saved;
    return v;
  }

 private:
  T cst(double c) const {
    if constexpr (std::is_same_v<T, Jet>) {
      return Jet::constant(c, dim_);
    } else {
      return c;
    }
  }

  static T scaled(double w, const T& v) { return w * v; }

  T power(const Node& n) {
    const T base = run(*n.args[0]);
    if (n.args[1]->op == Op::constant) {
      const double c = n.args[1]->value;
      if (c == 2.0) return base * base;
      if (c == 3.0) return base * base * base;
      if constexpr (std::is_same_v<T, Jet>) {
        return pow(base, c);
      } else {
        return std::pow(base, c);
      }
    }
    const T ex = run(*n.args[1]);
    if constexpr (std::is_same_v<T, Jet>) {
      return pow(base, ex);
    } else {
      return std::pow(base, ex);
    }
  }

  const double* x_;
  int dim_;
  const DiscreteMeasure* mu_;
  const double* y_ = nullptr;
  std::array<Jet, kMaxDim> vars_{};
};

bool any(const Node& n, bool (*pred)(const Node&)) {
  if (pred(n)) return true;
  for (const Expr& a : n.args) {
    if (any(*a, pred)) return true;
  }
  return false;
}

std::string point_text(const double* x, int dim) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(*e, os);
  return os.str();
}

bool equal(const Expr& a, const Expr& b) {
  if (a->op != b->op || a->args.size() != b->args.size()) return false;
  switch (a->op) {
    case Op::constant:
      if (a->value != b->value) return false;
      break;
    case Op::coord:
    case Op::ycoord:
      if (a->index != b->index) return false;
      break;
    case Op::ind:
      if (a->cmp != b->cmp) return false;
      break;
    case Op::mom:
      if (a->value != b->value || a->moment.kind != b->moment.kind || a->moment.component != b->moment.component) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!equal(a->args[i], b->args[i])) return false;
  }
  return true;
}

Expr make_constant(double c) {
  auto n = node(Op::constant);
  n->value = c;
  return n;
}

bool uses_measure(const Expr& e) {
  return any(*e, [](const Node& n) { return n.op == Op::mom || n.op == Op::integral; });
}

bool uses_x(const Expr& e) {
  return any(*e, [](const Node& n) { return n.op == Op::coord; });
}

int max_coord(const Expr& e) {
  struct Walk {
    static int go(const Node& n) {
      int m = n.op == Op::coord ? n.index : -1;
      for (const Expr& a : n.args) m = std::max(m, go(*a));
      return m;
    }
  };
  return Walk::go(*e);
}

Expr substitute_measure(const Expr& e, const DiscreteMeasure* mu) {
  const Node& n = *e;
  if (n.op == Op::mom) {
    if (mu == nullptr) throw EvalError("expression uses the measure but none was given");
    return make_constant(moment(*mu, n.value, n.moment));
  }
  if (n.op == Op::integral) {
    if (mu == nullptr) throw EvalError("expression uses the measure but none was given");
    if (uses_x(n.args[0])) return e;
    std::vector<double> terms(mu->size());
    Evaluator<double> ev(nullptr, mu->dim(), mu);
    for (std::size_t k = 0; k < mu->size(); ++k) {
      if (mu->weight(k) == 0.0) continue;
      terms[k] = mu->weight(k) * ev.run_at(*n.args[0], mu->point(k));
    }
    const double v = reduce_sum(terms);
    if (!std::isfinite(v)) throw EvalError("integral " + to_string(e) + " is not finite");
    return make_constant(v);
  }
  if (n.args.empty()) return e;
  auto out = std::make_shared<Node>(n);
  bool all_constant = true;
  for (Expr& a : out->args) {
    a = substitute_measure(a, mu);
    all_constant = all_constant && a->op == Op::constant;
  }
  if (all_constant) {
    Evaluator<double> ev(nullptr, 0, nullptr);
    const double v = ev.run(*out);
    if (!std::isfinite(v)) throw EvalError("constant sub-expression " + to_string(out) + " is not finite");
    return make_constant(v);
  }
  return out;
}

double eval(const Expr& e, const double* x, int dim, const DiscreteMeasure* mu) {
  Evaluator<double> ev(x, dim, mu);
  const double v = ev.run(*e);
  if (!std::isfinite(v)) throw EvalError("expression " + to_string(e) + " is not finite at x = " + point_text(x, dim));
  return v;
}

Jet eval_jet(const Expr& e, const double* x, int dim, const DiscreteMeasure* mu) {
  Evaluator<Jet> ev(x, dim, mu);
  const Jet v = ev.run(*e);
  if (!std::isfinite(v.v)) throw EvalError("expression " + to_string(e) + " is not finite at x = " + point_text(x, dim));
  return v;
}

}  // namespace kolmofix
