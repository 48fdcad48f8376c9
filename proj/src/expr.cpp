#include "nlpoisson/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <stdexcept>

#include "nlpoisson/errors.hpp"

namespace nlpoisson::expr {

// ---------------------------------------------------------------------------
// Variables

VarSpace::VarSpace(int dim, int components)
    : n_(dim), N_(components), pairs_(dim * (dim + 1) / 2) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("VarSpace: dimension must be 1..3");
  if (components < 1) throw std::invalid_argument("VarSpace: need at least one component");
}

int VarSpace::r(int j, int k, int l) const noexcept {
  if (k > l) std::swap(k, l);
  const int packed = k * n_ - k * (k - 1) / 2 + (l - k);
  return n_ + N_ + N_ * n_ + j * pairs_ + packed;
}

VarSpace::Kind VarSpace::kind(int var) const noexcept {
  if (var < n_) return Kind::X;
  if (var < n_ + N_) return Kind::P;
  if (var < n_ + N_ + N_ * n_) return Kind::Q;
  return Kind::R;
}

std::string VarSpace::name(int var) const {
  switch (kind(var)) {
    case Kind::X: return "x" + std::to_string(var + 1);
    case Kind::P: return "p" + std::to_string(var - n_ + 1);
    case Kind::Q: {
      const int rel = var - n_ - N_;
      return "q" + std::to_string(rel / n_ + 1) + "_" + std::to_string(rel % n_ + 1);
    }
    case Kind::R: {
      const int rel = var - n_ - N_ - N_ * n_;
      const int j = rel / pairs_;
      int packed = rel % pairs_;
      int k = 0;
      while (packed >= n_ - k) {
        packed -= n_ - k;
        ++k;
      }
      const int l = k + packed;
      return "r" + std::to_string(j + 1) + "_" + std::to_string(k + 1) + std::to_string(l + 1);
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Construction and simplification

namespace {

Expr make(Op op, Expr a = nullptr, Expr b = nullptr, double value = 0.0, int var = -1) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->a = std::move(a);
  node->b = std::move(b);
  node->value = value;
  node->var = var;
  return node;
}

bool finite(double v) { return std::isfinite(v); }

bool is_integer(double s) { return std::floor(s) == s && std::abs(s) < 1e9; }

}  // namespace

bool is_const(const Expr& e) { return e->op == Op::Const; }
bool is_const(const Expr& e, double v) { return e->op == Op::Const && e->value == v; }

bool equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Const: return a->value == b->value;
    case Op::Var: return a->var == b->var;
    case Op::Pow:
    case Op::AbsPow:
    case Op::SgnPow:
      if (a->value != b->value) return false;
      break;
    default: break;
  }
  return equal(a->a, b->a) && equal(a->b, b->b);
}

Expr constant(double v) { return make(Op::Const, nullptr, nullptr, v); }
Expr variable(int id) { return make(Op::Var, nullptr, nullptr, 0.0, id); }

Expr neg(Expr a) {
  if (a->op == Op::Const) return constant(-a->value);
  if (a->op == Op::Neg) return a->a;
  if (a->op == Op::Sub) return sub(a->b, a->a);
  return make(Op::Neg, std::move(a));
}

Expr add(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (b->op == Op::Neg) return sub(std::move(a), b->a);
  if (a->op == Op::Neg) return sub(std::move(b), a->a);
  return make(Op::Add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  if (equal(a, b)) return constant(0.0);
  if (b->op == Op::Neg) return add(std::move(a), b->a);
  return make(Op::Sub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(std::move(b));
  if (is_const(b, -1.0)) return neg(std::move(a));
  if (a->op == Op::Neg && b->op == Op::Neg) return mul(a->a, b->a);
  if (a->op == Op::Neg) return neg(mul(a->a, std::move(b)));
  if (b->op == Op::Neg) return neg(mul(std::move(a), b->a));
  return make(Op::Mul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
  if (is_const(b, 0.0)) throw DomainError("division by a constant zero");
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return constant(a->value / b->value);
  if (equal(a, b)) return constant(1.0);
  return make(Op::Div, std::move(a), std::move(b));
}

Expr abs_pow(Expr t, double s) {
  if (!(s >= 0.0) || !finite(s)) throw DomainError("abspow: exponent must be finite and >= 0");
  if (s == 0.0) return constant(1.0);
  if (is_const(t)) return constant(std::pow(std::abs(t->value), s));
  if (t->op == Op::Neg) return abs_pow(t->a, s);
  if (t->op == Op::AbsPow) return abs_pow(t->a, t->value * s);
  return make(Op::AbsPow, std::move(t), nullptr, s);
}

Expr sgn_pow(Expr t, double s) {
  if (!(s >= 0.0) || !finite(s)) throw DomainError("sgnpow: exponent must be finite and >= 0");
  if (is_const(t)) {
    const double v = t->value;
    return constant(v > 0 ? std::pow(v, s) : v < 0 ? -std::pow(-v, s) : 0.0);
  }
  if (t->op == Op::Neg) return neg(sgn_pow(t->a, s));
  return make(Op::SgnPow, std::move(t), nullptr, s);
}

Expr pow(Expr base, Expr exponent) {
  if (!is_const(exponent)) return exp(mul(std::move(exponent), ln(std::move(base))));
  const double s = exponent->value;
  if (s == 0.0) return constant(1.0);
  if (s == 1.0) return base;
  if (is_const(base)) {
    const double v = std::pow(base->value, s);
    if (finite(v)) return constant(v);
    throw DomainError("constant power is not a finite real number");
  }
  if (base->op == Op::AbsPow) return abs_pow(base->a, base->value * s);
  if (base->op == Op::Pow && is_integer(s)) {
    const double inner = base->value;
    if (is_integer(inner)) return pow(base->a, constant(inner * s));
  }
  return make(Op::Pow, std::move(base), nullptr, s);
}

Expr exp(Expr a) {
  if (is_const(a)) return constant(std::exp(a->value));
  return make(Op::Exp, std::move(a));
}

Expr ln(Expr a) {
  if (is_const(a)) {
    if (!(a->value > 0.0)) throw DomainError("ln of a non-positive constant");
    return constant(std::log(a->value));
  }
  if (a->op == Op::Exp) return a->a;
  return make(Op::Ln, std::move(a));
}

Expr sin(Expr a) {
  if (is_const(a)) return constant(std::sin(a->value));
  return make(Op::Sin, std::move(a));
}

Expr cos(Expr a) {
  if (is_const(a)) return constant(std::cos(a->value));
  return make(Op::Cos, std::move(a));
}

Expr sqrt(Expr a) {
  if (is_const(a)) {
    if (a->value < 0.0) throw DomainError("sqrt of a negative constant");
    return constant(std::sqrt(a->value));
  }
  return make(Op::Sqrt, std::move(a));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const VarSpace& vars, int line, int column_offset)
      : text_(text), vars_(vars), line_(line), offset_(column_offset) {}

  Expr run() {
    Expr e = expression();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    throw ParseError(line_, offset_ + static_cast<int>(at) + 1, what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  // Wraps constructors so that domain problems become positioned parse errors.
  template <class F>
  Expr build(std::size_t at, F&& f) const {
    try {
      return f();
    } catch (const DomainError& e) {
      fail_at(at, e.what());
    }
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        Expr rhs = term();
        lhs = build(at, [&] { return add(lhs, rhs); });
      } else if (accept('-')) {
        Expr rhs = term();
        lhs = build(at, [&] { return sub(lhs, rhs); });
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        Expr rhs = unary();
        lhs = build(at, [&] { return mul(lhs, rhs); });
      } else if (accept('/')) {
        Expr rhs = unary();
        lhs = build(at, [&] { return div(lhs, rhs); });
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) {
      Expr e = unary();
      return build(at, [&] { return pow(base, e); });
    }
    return base;
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) fail_at(start, "malformed number '" + token + "'");
    return constant(v);
  }

  int index_digit(std::size_t at, char c, int limit, const std::string& what) const {
    if (!std::isdigit(static_cast<unsigned char>(c))) fail_at(at, "malformed " + what);
    const int v = c - '0';
    if (v < 1 || v > limit) {
      fail_at(at, what + " index " + std::to_string(v) + " out of range 1.." + std::to_string(limit));
    }
    return v - 1;
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') return call(id, start);
    if (id == "pi") return constant(std::numbers::pi);
    const int n = vars_.dim();
    const int N = vars_.components();
    auto bad = [&] { fail_at(start, "unknown identifier '" + id + "'"); };
    auto number_at = [&](std::size_t from, std::size_t to) {
      if (from >= to || to - from > 3) bad();
      for (std::size_t i = from; i < to; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) bad();
      }
      return std::stoi(id.substr(from, to - from));
    };
    auto check = [&](int v, int limit, const char* what) {
      if (v < 1 || v > limit) {
        fail_at(start, std::string(what) + " index " + std::to_string(v) + " out of range 1.." +
                           std::to_string(limit) + " in '" + id + "'");
      }
      return v - 1;
    };
    const char head = id[0];
    if (head == 'x' || head == 'p') {
      const int v = number_at(1, id.size());
      if (head == 'x') return variable(vars_.x(check(v, n, "coordinate")));
      return variable(vars_.p(check(v, N, "component")));
    }
    if (head == 'q' || head == 'r') {
      const std::size_t us = id.find('_');
      if (us == std::string::npos) bad();
      const int j = check(number_at(1, us), N, "component");
      const std::string tail = id.substr(us + 1);
      if (head == 'q') {
        if (tail.size() != 1) bad();
        return variable(vars_.q(j, check(number_at(us + 1, id.size()), n, "derivative")));
      }
      if (tail.size() != 2) bad();
      const int k = index_digit(start + us + 1, tail[0], n, "derivative");
      const int l = index_digit(start + us + 2, tail[1], n, "derivative");
      return variable(vars_.r(j, k, l));
    }
    bad();
    return nullptr;
  }

  Expr call(const std::string& name, std::size_t start) {
    expect('(');
    std::vector<Expr> args;
    std::vector<std::size_t> arg_pos;
    skip_space();
    if (!accept(')')) {
      do {
        skip_space();
        arg_pos.push_back(pos_);
        args.push_back(expression());
      } while (accept(','));
      expect(')');
    }
    auto arity = [&](std::size_t k) {
      if (args.size() != k) {
        fail_at(start, name + " expects " + std::to_string(k) + " argument" + (k == 1 ? "" : "s"));
      }
    };
    auto exponent = [&](std::size_t i) {
      if (!is_const(args[i])) fail_at(arg_pos[i], name + ": exponent must be a constant");
      return args[i]->value;
    };
    if (name == "exp") return arity(1), build(start, [&] { return exp(args[0]); });
    if (name == "ln" || name == "log") return arity(1), build(start, [&] { return ln(args[0]); });
    if (name == "sin") return arity(1), build(start, [&] { return sin(args[0]); });
    if (name == "cos") return arity(1), build(start, [&] { return cos(args[0]); });
    if (name == "sqrt") return arity(1), build(start, [&] { return sqrt(args[0]); });
    if (name == "abs") return arity(1), build(start, [&] { return abs_pow(args[0], 1.0); });
    if (name == "abspow") {
      arity(2);
      const double s = exponent(1);
      return build(start, [&] { return abs_pow(args[0], s); });
    }
    if (name == "sgnpow") {
      arity(2);
      const double s = exponent(1);
      return build(start, [&] { return sgn_pow(args[0], s); });
    }
    fail_at(start, "unknown function '" + name + "'");
  }

  std::string_view text_;
  const VarSpace& vars_;
  int line_;
  int offset_;
  std::size_t pos_ = 0;
};

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan") {
    throw DomainError("cannot print a non-finite constant");
  }
  return v < 0 || std::signbit(v) ? "(" + s + ")" : s;
}

void print_into(std::string& out, const Expr& e, const VarSpace& vars) {
  auto unary_fn = [&](const char* name) {
    out += name;
    out += '(';
    print_into(out, e->a, vars);
    out += ')';
  };
  auto binary = [&](const char* op) {
    out += '(';
    print_into(out, e->a, vars);
    out += op;
    print_into(out, e->b, vars);
    out += ')';
  };
  switch (e->op) {
    case Op::Const: out += number_text(e->value); break;
    case Op::Var: out += vars.name(e->var); break;
    case Op::Add: binary(" + "); break;
    case Op::Sub: binary(" - "); break;
    case Op::Mul: binary(" * "); break;
    case Op::Div: binary(" / "); break;
    case Op::Neg:
      out += "(-";
      print_into(out, e->a, vars);
      out += ')';
      break;
    case Op::Pow:
      out += '(';
      print_into(out, e->a, vars);
      out += " ^ ";
      out += number_text(e->value);
      out += ')';
      break;
    case Op::Exp: unary_fn("exp"); break;
    case Op::Ln: unary_fn("ln"); break;
    case Op::Sin: unary_fn("sin"); break;
    case Op::Cos: unary_fn("cos"); break;
    case Op::Sqrt: unary_fn("sqrt"); break;
    case Op::AbsPow:
    case Op::SgnPow:
      out += e->op == Op::AbsPow ? "abspow(" : "sgnpow(";
      print_into(out, e->a, vars);
      out += ", ";
      out += number_text(e->value);
      out += ')';
      break;
  }
}

}  // namespace

Expr parse(std::string_view text, const VarSpace& vars, int line, int column_offset) {
  return Parser(text, vars, line, column_offset).run();
}

std::string print(const Expr& e, const VarSpace& vars) {
  std::string out;
  print_into(out, e, vars);
  return out;
}

// ---------------------------------------------------------------------------
// Calculus

Expr diff(const Expr& e, int var) {
  switch (e->op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(e->var == var ? 1.0 : 0.0);
    case Op::Add: return add(diff(e->a, var), diff(e->b, var));
    case Op::Sub: return sub(diff(e->a, var), diff(e->b, var));
    case Op::Neg: return neg(diff(e->a, var));
    case Op::Mul: return add(mul(diff(e->a, var), e->b), mul(e->a, diff(e->b, var)));
    case Op::Div: {
      const Expr da = diff(e->a, var);
      const Expr db = diff(e->b, var);
      if (is_const(db, 0.0)) return div(da, e->b);
      return div(sub(mul(da, e->b), mul(e->a, db)), pow(e->b, constant(2.0)));
    }
    case Op::Pow: {
      const Expr da = diff(e->a, var);
      if (is_const(da, 0.0)) return constant(0.0);
      return mul(mul(constant(e->value), pow(e->a, constant(e->value - 1.0))), da);
    }
    case Op::Exp: return mul(e, diff(e->a, var));
    case Op::Ln: return div(diff(e->a, var), e->a);
    case Op::Sin: return mul(cos(e->a), diff(e->a, var));
    case Op::Cos: return neg(mul(sin(e->a), diff(e->a, var)));
    case Op::Sqrt: return div(diff(e->a, var), mul(constant(2.0), e));
    case Op::AbsPow: {
      const Expr da = diff(e->a, var);
      if (is_const(da, 0.0)) return constant(0.0);
      if (!(e->value > 1.0)) {
        throw DomainError("|t|^s is not continuously differentiable at t = 0 for s <= 1");
      }
      return mul(mul(constant(e->value), sgn_pow(e->a, e->value - 1.0)), da);
    }
    case Op::SgnPow: {
      const Expr da = diff(e->a, var);
      if (is_const(da, 0.0)) return constant(0.0);
      if (!(e->value >= 1.0)) {
        throw DomainError("sign(t)|t|^s is not continuously differentiable at t = 0 for s < 1");
      }
      return mul(mul(constant(e->value), abs_pow(e->a, e->value - 1.0)), da);
    }
  }
  return constant(0.0);
}

Expr substitute(const Expr& e, std::span<const Expr> replacement) {
  switch (e->op) {
    case Op::Const: return e;
    case Op::Var:
      if (e->var >= 0 && static_cast<std::size_t>(e->var) < replacement.size() &&
          replacement[static_cast<std::size_t>(e->var)]) {
        return replacement[static_cast<std::size_t>(e->var)];
      }
      return e;
    case Op::Add: return add(substitute(e->a, replacement), substitute(e->b, replacement));
    case Op::Sub: return sub(substitute(e->a, replacement), substitute(e->b, replacement));
    case Op::Mul: return mul(substitute(e->a, replacement), substitute(e->b, replacement));
    case Op::Div: return div(substitute(e->a, replacement), substitute(e->b, replacement));
    case Op::Neg: return neg(substitute(e->a, replacement));
    case Op::Pow: return pow(substitute(e->a, replacement), constant(e->value));
    case Op::Exp: return exp(substitute(e->a, replacement));
    case Op::Ln: return ln(substitute(e->a, replacement));
    case Op::Sin: return sin(substitute(e->a, replacement));
    case Op::Cos: return cos(substitute(e->a, replacement));
    case Op::Sqrt: return sqrt(substitute(e->a, replacement));
    case Op::AbsPow: return abs_pow(substitute(e->a, replacement), e->value);
    case Op::SgnPow: return sgn_pow(substitute(e->a, replacement), e->value);
  }
  return e;
}

namespace {

void collect(const Expr& e, std::set<int>& out) {
  if (!e) return;
  if (e->op == Op::Var) out.insert(e->var);
  collect(e->a, out);
  collect(e->b, out);
}

}  // namespace

std::vector<int> variables(const Expr& e) {
  std::set<int> ids;
  collect(e, ids);
  return {ids.begin(), ids.end()};
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void emit(const Expr& e, std::vector<Node const*>& order) {
  if (e->a) emit(e->a, order);
  if (e->b) emit(e->b, order);
  order.push_back(e.get());
}

double int_power(double base, int s) {
  double result = 1.0;
  double b = base;
  unsigned k = static_cast<unsigned>(s);
  while (k) {
    if (k & 1U) result *= b;
    b *= b;
    k >>= 1U;
  }
  return result;
}

}  // namespace

Compiled::Compiled(const Expr& e, const VarSpace& vars)
    : source_(e), vars_(std::make_shared<const VarSpace>(vars)) {
  std::vector<Node const*> order;
  emit(e, order);
  std::size_t depth = 0;
  for (const Node* node : order) {
    code_.push_back({node->op, node->value, node->var, node});
    switch (node->op) {
      case Op::Const:
      case Op::Var: ++depth; break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: --depth; break;
      default: break;
    }
    depth_ = std::max(depth_, depth);
  }
}

double Compiled::operator()(std::span<const double> values) const {
  constexpr std::size_t kInline = 64;
  double inline_stack[kInline] = {};
  std::vector<double> heap;
  double* stack = inline_stack;
  if (depth_ > kInline) {
    heap.resize(depth_);
    stack = heap.data();
  }
  std::size_t top = 0;
  auto fail = [&](const Instr& in, const std::string& what) {
    // Rebuild a shared handle for printing; the node is owned by source_.
    std::shared_ptr<const Node> alias(source_, in.node);
    throw DomainError(what + " in '" + print(alias, *vars_) + "'");
  };
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const: stack[top++] = in.value; break;
      case Op::Var: stack[top++] = values[static_cast<std::size_t>(in.var)]; break;
      case Op::Add: --top; stack[top - 1] += stack[top]; break;
      case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
      case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
      case Op::Div:
        --top;
        if (stack[top] == 0.0) fail(in, "division by zero");
        stack[top - 1] /= stack[top];
        break;
      case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::Pow: {
        const double b = stack[top - 1];
        double v;
        if (in.value > 0 && in.value <= 16 && std::floor(in.value) == in.value) {
          v = int_power(b, static_cast<int>(in.value));
        } else {
          if (b < 0.0 && std::floor(in.value) != in.value) {
            fail(in, "negative base " + std::to_string(b) + " with a fractional exponent");
          }
          if (b == 0.0 && in.value < 0.0) fail(in, "zero base with a negative exponent");
          v = std::pow(b, in.value);
        }
        stack[top - 1] = v;
        break;
      }
      case Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Op::Ln:
        if (!(stack[top - 1] > 0.0)) fail(in, "ln of non-positive value " + std::to_string(stack[top - 1]));
        stack[top - 1] = std::log(stack[top - 1]);
        break;
      case Op::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Op::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case Op::Sqrt:
        if (stack[top - 1] < 0.0) fail(in, "sqrt of negative value " + std::to_string(stack[top - 1]));
        stack[top - 1] = std::sqrt(stack[top - 1]);
        break;
      case Op::AbsPow:
      case Op::SgnPow: {
        const double t = stack[top - 1];
        const double a = std::abs(t);
        double v;
        if (in.value <= 16 && std::floor(in.value) == in.value) {
          v = int_power(a, static_cast<int>(in.value));
        } else {
          v = std::pow(a, in.value);
        }
        if (in.op == Op::SgnPow && t < 0.0) v = -v;
        if (in.op == Op::SgnPow && t == 0.0) v = 0.0;
        stack[top - 1] = v;
        break;
      }
    }
  }
  return stack[0];
}

}  // namespace nlpoisson::expr
