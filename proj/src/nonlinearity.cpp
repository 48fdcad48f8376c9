#include "nlpoisson/nonlinearity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "nlpoisson/errors.hpp"

namespace nlpoisson {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Thm11: return "thm11";
    case Mode::Thm12: return "thm12";
    case Mode::Thm13: return "thm13";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "thm11") return Mode::Thm11;
  if (text == "thm12") return Mode::Thm12;
  if (text == "thm13") return Mode::Thm13;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected thm11, thm12 or thm13)");
}

bool NonlinearitySpec::any_x() const {
  return std::find(depends_on_x.begin(), depends_on_x.end(), true) != depends_on_x.end();
}

bool NonlinearitySpec::any_r() const {
  return std::find(depends_on_r.begin(), depends_on_r.end(), true) != depends_on_r.end();
}

double NonlinearitySpec::at_zero(int i) const {
  const std::vector<double> zero(static_cast<std::size_t>(vars.size()), 0.0);
  return expr::Compiled(asts[static_cast<std::size_t>(i)], vars)(zero);
}

NonlinearitySpec make_spec(int dim, std::vector<expr::Expr> asts) {
  if (asts.empty()) throw std::invalid_argument("make_spec: no components");
  NonlinearitySpec spec;
  spec.dim = dim;
  spec.components = static_cast<int>(asts.size());
  spec.vars = expr::VarSpace(dim, spec.components);
  spec.asts = std::move(asts);
  for (const auto& e : spec.asts) {
    bool x = false;
    bool r = false;
    for (int v : expr::variables(e)) {
      if (v >= spec.vars.size()) throw std::invalid_argument("make_spec: variable outside the system");
      x = x || spec.vars.kind(v) == expr::VarSpace::Kind::X;
      r = r || spec.vars.kind(v) == expr::VarSpace::Kind::R;
    }
    spec.depends_on_x.push_back(x);
    spec.depends_on_r.push_back(r);
  }
  spec.source = print_spec(spec);
  return spec;
}

NonlinearitySpec parse_nonlinearity(std::string_view source, int dim, int components) {
  struct Line {
    int number;
    int column;
    std::string text;
  };
  std::map<int, Line> rhs;
  int line_no = 0;
  int largest = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string line(source.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t p = 0;
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    if (p == line.size()) {
      if (end == source.size()) break;
      continue;
    }
    if (line[p] != 'a') throw ParseError(line_no, static_cast<int>(p) + 1, "expected 'aI = expression'");
    std::size_t q = p + 1;
    while (q < line.size() && std::isdigit(static_cast<unsigned char>(line[q]))) ++q;
    if (q == p + 1 || q - p > 4) throw ParseError(line_no, static_cast<int>(p) + 1, "expected a component label such as a1");
    const int index = std::stoi(line.substr(p + 1, q - p - 1));
    std::size_t eq = q;
    while (eq < line.size() && std::isspace(static_cast<unsigned char>(line[eq]))) ++eq;
    if (eq >= line.size() || line[eq] != '=') throw ParseError(line_no, static_cast<int>(eq) + 1, "expected '='");
    if (index < 1) throw ParseError(line_no, static_cast<int>(p) + 1, "component labels start at a1");
    if (rhs.count(index)) {
      throw ParseError(line_no, static_cast<int>(p) + 1, "a" + std::to_string(index) + " defined twice");
    }
    rhs[index] = {line_no, static_cast<int>(eq) + 1, line.substr(eq + 1)};
    largest = std::max(largest, index);
    if (end == source.size()) break;
  }
  if (rhs.empty()) throw ParseError(1, 1, "no 'aI = expression' lines");
  const int N = components > 0 ? components : largest;
  if (largest > N) {
    const Line& l = rhs[largest];
    throw ParseError(l.number, 1, "a" + std::to_string(largest) + " exceeds the declared " +
                                      std::to_string(N) + " components");
  }
  for (int i = 1; i <= N; ++i) {
    if (!rhs.count(i)) throw ParseError(line_no, 1, "missing definition of a" + std::to_string(i));
  }
  if (dim < 1 || dim > 3) throw std::invalid_argument("parse_nonlinearity: dimension must be 1..3");
  const expr::VarSpace vars(dim, N);
  std::vector<expr::Expr> asts;
  for (int i = 1; i <= N; ++i) {
    const Line& l = rhs[i];
    asts.push_back(expr::parse(l.text, vars, l.number, l.column));
  }
  NonlinearitySpec spec = make_spec(dim, std::move(asts));
  spec.source = std::string(source);
  return spec;
}

std::string print_spec(const NonlinearitySpec& spec) {
  std::string out;
  for (int i = 0; i < spec.components; ++i) {
    out += "a" + std::to_string(i + 1) + " = " + expr::print(spec.asts[static_cast<std::size_t>(i)], spec.vars) + "\n";
  }
  return out;
}

expr::Expr diff(const NonlinearitySpec& spec, int component, int var) {
  if (component < 0 || component >= spec.components) throw std::out_of_range("diff: component");
  if (var < 0 || var >= spec.vars.size()) throw std::out_of_range("diff: variable");
  return expr::diff(spec.asts[static_cast<std::size_t>(component)], var);
}

NonlinearitySpec shift_spec(const NonlinearitySpec& spec, const std::vector<double>& c0,
                            const std::vector<double>& c1) {
  const int n = spec.dim;
  const int N = spec.components;
  if (static_cast<int>(c0.size()) != N || static_cast<int>(c1.size()) != N * n) {
    throw std::invalid_argument("shift_spec: c0 needs N entries and c1 needs N*n entries");
  }
  const expr::VarSpace& vs = spec.vars;
  std::vector<expr::Expr> repl(static_cast<std::size_t>(vs.size()));
  for (int j = 0; j < N; ++j) {
    expr::Expr p = expr::add(expr::variable(vs.p(j)), expr::constant(c0[static_cast<std::size_t>(j)]));
    for (int k = 0; k < n; ++k) {
      const double c = c1[static_cast<std::size_t>(j * n + k)];
      p = expr::add(p, expr::mul(expr::constant(c), expr::variable(vs.x(k))));
      repl[static_cast<std::size_t>(vs.q(j, k))] =
          expr::add(expr::variable(vs.q(j, k)), expr::constant(c));
    }
    repl[static_cast<std::size_t>(vs.p(j))] = p;
  }
  std::vector<expr::Expr> asts;
  for (const auto& e : spec.asts) asts.push_back(expr::substitute(e, repl));
  return make_spec(n, std::move(asts));
}

CompiledSpec::CompiledSpec(const NonlinearitySpec& spec) : spec_(spec) {
  std::vector<bool> seen(static_cast<std::size_t>(spec.vars.size()), false);
  for (const auto& e : spec_.asts) {
    code_.emplace_back(e, spec_.vars);
    for (int v : expr::variables(e)) seen[static_cast<std::size_t>(v)] = true;
  }
  for (int v = 0; v < spec.vars.size(); ++v) {
    if (seen[static_cast<std::size_t>(v)]) used_.push_back(v);
  }
}

GridField eval_on_field(const NonlinearitySpec& spec, const GridField& u) {
  const int n = spec.dim;
  const int N = spec.components;
  if (u.grid().dim() != n || u.components() != N) {
    throw std::invalid_argument("eval_on_field: field shape does not match the system");
  }
  const CompiledSpec code(spec);
  const expr::VarSpace& vs = spec.vars;
  bool need_q[3] = {false, false, false};
  bool need_r[3][3] = {};
  for (int v : code.used()) {
    const auto kind = vs.kind(v);
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < n; ++k) {
        if (kind == expr::VarSpace::Kind::Q && v == vs.q(j, k)) need_q[k] = true;
        for (int l = k; l < n; ++l) {
          if (kind == expr::VarSpace::Kind::R && v == vs.r(j, k, l)) need_r[k][l] = true;
        }
      }
    }
  }
  std::vector<std::optional<GridField>> first(3);
  std::vector<std::optional<GridField>> second(9);
  for (int k = 0; k < n; ++k) {
    if (need_q[k]) first[static_cast<std::size_t>(k)] = derivative(u, unit_index(k));
    for (int l = k; l < n; ++l) {
      if (need_r[k][l]) second[static_cast<std::size_t>(k * 3 + l)] = derivative(u, pair_index(k, l));
    }
  }

  const QuadGrid& grid = u.grid();
  GridField out(u.grid_ptr(), N, u.alpha());
  const long count = static_cast<long>(grid.size());
  long bad_node = count;
  std::string bad_message;
#pragma omp parallel
  {
    std::vector<double> values(static_cast<std::size_t>(vs.size()), 0.0);
#pragma omp for schedule(static)
    for (long i = 0; i < count; ++i) {
      const std::size_t node = static_cast<std::size_t>(i);
      const Point& x = grid.nodes()[node];
      for (int k = 0; k < n; ++k) values[static_cast<std::size_t>(vs.x(k))] = x[k];
      for (int j = 0; j < N; ++j) {
        values[static_cast<std::size_t>(vs.p(j))] = u.at(node, j);
        for (int k = 0; k < n; ++k) {
          if (first[static_cast<std::size_t>(k)]) {
            values[static_cast<std::size_t>(vs.q(j, k))] = first[static_cast<std::size_t>(k)]->at(node, j);
          }
          for (int l = k; l < n; ++l) {
            if (second[static_cast<std::size_t>(k * 3 + l)]) {
              values[static_cast<std::size_t>(vs.r(j, k, l))] =
                  second[static_cast<std::size_t>(k * 3 + l)]->at(node, j);
            }
          }
        }
      }
      for (int c = 0; c < N; ++c) {
        try {
          out.at(node, c) = code.eval(c, values);
        } catch (const DomainError& e) {
#pragma omp critical(nlpoisson_eval_error)
          {
            // Keep the lowest node so the message is independent of scheduling.
            if (i < bad_node) {
              bad_node = i;
              std::ostringstream msg;
              msg << "a" << c + 1 << " at node " << i << " (x = ";
              for (int k = 0; k < n; ++k) msg << (k ? ", " : "") << format_double(x[k]);
              msg << "): " << e.what();
              bad_message = msg.str();
            }
          }
        }
      }
    }
  }
  if (bad_node < count) throw DomainError(bad_message);
  return out;
}

HypothesisReport hypothesis_check(const NonlinearitySpec& spec, Mode mode,
                                  double thm11_threshold) {
  HypothesisReport rep;
  rep.mode = mode;
  const expr::VarSpace& vs = spec.vars;
  const std::vector<double> zero(static_cast<std::size_t>(vs.size()), 0.0);
  auto at0 = [&](const expr::Expr& e) { return expr::Compiled(e, vs)(zero); };
  auto fmt = [](double v) { return format_double(v); };

  std::string worst_grad;
  std::string worst_a0;
  bool second_r_vanish = true;
  for (int i = 0; i < spec.components; ++i) {
    const double a0 = std::abs(at0(spec.asts[static_cast<std::size_t>(i)]));
    if (a0 > rep.a0) {
      rep.a0 = a0;
      worst_a0 = "a" + std::to_string(i + 1) + "(0) = " + fmt(at0(spec.asts[static_cast<std::size_t>(i)]));
    }
    double gr = 0.0;
    double hr = 0.0;
    for (int v = 0; v < vs.size(); ++v) {
      const expr::Expr d = diff(spec, i, v);
      if (expr::is_const(d, 0.0)) continue;
      const double g = std::abs(at0(d));
      if (g > rep.grad_a0) {
        rep.grad_a0 = g;
        worst_grad = "d a" + std::to_string(i + 1) + "/d " + vs.name(v) + " = " + fmt(at0(d));
      }
      if (vs.kind(v) != expr::VarSpace::Kind::R) continue;
      gr += g;
      for (int w = 0; w < vs.size(); ++w) {
        if (vs.kind(w) != expr::VarSpace::Kind::R) continue;
        const expr::Expr dd = expr::diff(d, w);
        if (expr::is_const(dd, 0.0)) continue;
        second_r_vanish = false;
        hr += std::abs(at0(dd));
      }
    }
    rep.grad_r_a0 = std::max(rep.grad_r_a0, gr);
    rep.hess_r_a0 = std::max(rep.hess_r_a0, hr);
  }

  auto fail = [&](std::string what) {
    rep.pass = false;
    rep.failures.push_back(std::move(what));
  };
  constexpr double kZero = 1e-12;
  switch (mode) {
    case Mode::Thm13:
      if (spec.any_x()) fail("a depends on x (thm13 needs an autonomous system)");
      if (rep.a0 > kZero) fail("a(0) != 0 (" + worst_a0 + ")");
      if (rep.grad_a0 > kZero) fail("grad a(0) != 0 (" + worst_grad + ")");
      break;
    case Mode::Thm12:
      // First-order systems qualify unconditionally. An r-affine system with
      // grad_r a(0) = 0 is accepted too: its r-part is the b(x) Hess u term of
      // the variable-coefficient reduction.
      if (spec.any_r()) {
        if (!second_r_vanish) fail("a is not affine in r (thm12 needs a first-order system)");
        if (rep.grad_r_a0 > kZero) fail("grad_r a(0) != 0 (= " + fmt(rep.grad_r_a0) + ")");
      }
      break;
    case Mode::Thm11:
      rep.threshold = thm11_threshold;
      if (rep.a0 > kZero) fail("a(0) != 0 (" + worst_a0 + ")");
      if (rep.grad_r_a0 + rep.hess_r_a0 >= thm11_threshold && rep.grad_r_a0 + rep.hess_r_a0 > 0.0) {
        fail("|grad_r a(0)| + |Hess_r a(0)| = " + fmt(rep.grad_r_a0 + rep.hess_r_a0) +
             " is not below " + fmt(thm11_threshold));
      }
      break;
  }
  return rep;
}

}  // namespace nlpoisson
