#include "nlpoisson/applications.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "nlpoisson/errors.hpp"
#include "nlpoisson/solver.hpp"

namespace nlpoisson {

using expr::Expr;

namespace {

// Evaluates trees in the x variables of a dim-dimensional space.
class XEvaluator {
 public:
  XEvaluator(const std::vector<Expr>& trees, int dim) : vars_(dim, 1), values_(static_cast<std::size_t>(vars_.size()), 0.0) {
    for (const Expr& e : trees) code_.emplace_back(e, vars_);
  }
  double operator()(std::size_t i, const Point& x) {
    for (int k = 0; k < vars_.dim(); ++k) values_[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
    return code_[i](values_);
  }

 private:
  expr::VarSpace vars_;
  std::vector<double> values_;
  std::vector<expr::Compiled> code_;
};

bool diagonal(const MetricSpec& m) {
  for (int i = 0; i < m.dim; ++i) {
    for (int j = 0; j < m.dim; ++j) {
      if (i != j && !expr::is_const(m.at(i, j), 0.0)) return false;
    }
  }
  return true;
}

Expr det_of(const MetricSpec& m) {
  using namespace expr;
  const auto& g = [&](int i, int j) { return m.at(i, j); };
  if (diagonal(m)) {
    Expr d = g(0, 0);
    for (int i = 1; i < m.dim; ++i) d = mul(d, g(i, i));
    return d;
  }
  switch (m.dim) {
    case 1: return g(0, 0);
    case 2: return sub(mul(g(0, 0), g(1, 1)), mul(g(0, 1), g(1, 0)));
    default: {
      const Expr c0 = sub(mul(g(1, 1), g(2, 2)), mul(g(1, 2), g(2, 1)));
      const Expr c1 = sub(mul(g(1, 0), g(2, 2)), mul(g(1, 2), g(2, 0)));
      const Expr c2 = sub(mul(g(1, 0), g(2, 1)), mul(g(1, 1), g(2, 0)));
      return add(sub(mul(g(0, 0), c0), mul(g(0, 1), c1)), mul(g(0, 2), c2));
    }
  }
}

bool positive_definite(const Matrix3& A, int dim) {
  // leading principal minors
  if (!(A[0][0] > 0)) return false;
  if (dim >= 2 && !(A[0][0] * A[1][1] - A[0][1] * A[1][0] > 0)) return false;
  if (dim == 3) {
    const double d = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                     A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                     A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    if (!(d > 0)) return false;
  }
  return true;
}

std::vector<double> identity(int rows, int cols) {
  std::vector<double> m(static_cast<std::size_t>(rows * cols), 0.0);
  for (int i = 0; i < std::min(rows, cols); ++i) m[static_cast<std::size_t>(i * cols + i)] = 1.0;
  return m;
}

std::string q_name(int j, int k) { return "q" + std::to_string(j + 1) + "_" + std::to_string(k + 1); }
std::string r_name(int j, int k, int l) {
  return "r" + std::to_string(j + 1) + "_" + std::to_string(k + 1) + std::to_string(l + 1);
}

}  // namespace

Matrix3 MetricSpec::eval(const Point& x) const {
  XEvaluator ev(g, dim);
  Matrix3 out{};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) out[i][j] = ev(static_cast<std::size_t>(i * dim + j), x);
  }
  return out;
}

bool MetricSpec::is_euclidean() const {
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (!expr::is_const(at(i, j), i == j ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

MetricSpec euclidean_metric(int dim) {
  MetricSpec m;
  m.dim = dim;
  m.name = "euclidean";
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m.g.push_back(expr::constant(i == j ? 1.0 : 0.0));
  }
  return m;
}

MetricSpec parse_metric(std::string_view source, int dim, std::string name) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("parse_metric: dimension must be 1..3");
  const expr::VarSpace vars(dim, 1);
  MetricSpec m = euclidean_metric(dim);
  m.name = std::move(name);
  std::vector<int> given(static_cast<std::size_t>(dim * dim), 0);
  int line_no = 0;
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string line(source.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t p = 0;
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    if (p == line.size()) continue;
    const int col = static_cast<int>(p) + 1;
    if (line.size() < p + 3 || line[p] != 'g' || !std::isdigit(static_cast<unsigned char>(line[p + 1])) ||
        !std::isdigit(static_cast<unsigned char>(line[p + 2]))) {
      throw ParseError(line_no, col, "expected 'gij = expression'");
    }
    const int i = line[p + 1] - '1';
    const int j = line[p + 2] - '1';
    if (i < 0 || j < 0 || i >= dim || j >= dim) {
      throw ParseError(line_no, col + 1, "metric index out of range for dimension " + std::to_string(dim));
    }
    std::size_t eq = p + 3;
    while (eq < line.size() && std::isspace(static_cast<unsigned char>(line[eq]))) ++eq;
    if (eq >= line.size() || line[eq] != '=') throw ParseError(line_no, static_cast<int>(eq) + 1, "expected '='");
    const Expr e = expr::parse(line.substr(eq + 1), vars, line_no, static_cast<int>(eq) + 1);
    for (int v : expr::variables(e)) {
      if (vars.kind(v) != expr::VarSpace::Kind::X) {
        throw ParseError(line_no, static_cast<int>(eq) + 2, "metric entries may only depend on x, found " + vars.name(v));
      }
    }
    const auto ij = static_cast<std::size_t>(i * dim + j);
    const auto ji = static_cast<std::size_t>(j * dim + i);
    if (given[ij]) throw ParseError(line_no, col, "g" + std::to_string(i + 1) + std::to_string(j + 1) + " defined twice");
    if (given[ji] && expr::print(m.g[ji], vars) != expr::print(e, vars)) {
      throw ParseError(line_no, col, "metric is not symmetric: g" + std::to_string(i + 1) + std::to_string(j + 1) +
                                         " differs from g" + std::to_string(j + 1) + std::to_string(i + 1));
    }
    given[ij] = 1;
    m.g[ij] = e;
    m.g[ji] = e;
  }
  if (!positive_definite(m.eval(Point{}), dim)) {
    throw std::invalid_argument("metric " + m.name + " is not positive definite at the origin");
  }
  return m;
}

std::vector<Expr> inverse_metric(const MetricSpec& m) {
  using namespace expr;
  const int n = m.dim;
  const Expr det = det_of(m);
  std::vector<Expr> inv(static_cast<std::size_t>(n * n));
  auto set = [&](int i, int j, const Expr& cof) { inv[static_cast<std::size_t>(i * n + j)] = div(cof, det); };
  const auto& g = [&](int i, int j) { return m.at(i, j); };
  if (diagonal(m)) {
    // 1 / g_ii directly; the adjugate route divides products of g_ii and
    // overflows long before the entries themselves do.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) inv[static_cast<std::size_t>(i * n + j)] = i == j ? div(constant(1.0), g(i, i)) : constant(0.0);
    }
    return inv;
  }
  if (n == 1) {
    set(0, 0, constant(1.0));
  } else if (n == 2) {
    set(0, 0, g(1, 1));
    set(0, 1, neg(g(0, 1)));
    set(1, 0, neg(g(1, 0)));
    set(1, 1, g(0, 0));
  } else {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        // inverse entry (i, j) is the cofactor of (j, i)
        const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
        const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        set(i, j, sub(mul(g(r0, c0), g(r1, c1)), mul(g(r0, c1), g(r1, c0))));
      }
    }
  }
  return inv;
}

Expr sqrt_det(const MetricSpec& m) { return expr::sqrt(det_of(m)); }

Christoffel christoffel(const MetricSpec& m, bool check_origin) {
  using namespace expr;
  const int n = m.dim;
  if (check_origin) {
    XEvaluator ev({det_of(m)}, n);
    const double d0 = ev(0, Point{});
    if (!(d0 > 0)) throw std::invalid_argument("christoffel: det g(0) = " + format_double(d0) + " is not positive");
  }
  const std::vector<Expr> inv = inverse_metric(m);
  // dg[(l * n + j) * n + k] = d_k g_lj
  std::vector<Expr> dg(static_cast<std::size_t>(n * n * n));
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) dg[static_cast<std::size_t>((l * n + j) * n + k)] = diff(m.at(l, j), k);
    }
  }
  auto d = [&](int l, int j, int k) { return dg[static_cast<std::size_t>((l * n + j) * n + k)]; };
  Christoffel G(static_cast<std::size_t>(n), std::vector<std::vector<Expr>>(static_cast<std::size_t>(n),
                                                                          std::vector<Expr>(static_cast<std::size_t>(n))));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        Expr s = constant(0.0);
        for (int l = 0; l < n; ++l) {
          const Expr bracket = sub(add(d(l, j, k), d(l, k, j)), d(j, k, l));
          s = add(s, mul(inv[static_cast<std::size_t>(i * n + l)], bracket));
        }
        s = mul(constant(0.5), s);
        G[i][j][k] = s;
        G[i][k][j] = s;
      }
    }
  }
  return G;
}

ProblemPreset harmonic_map_system(const MetricSpec& domain, const MetricSpec& target, int n,
                                  std::vector<double> c1) {
  using namespace expr;
  if (domain.dim != n) throw std::invalid_argument("harmonic map: domain metric dimension differs from n");
  if (!domain.is_euclidean()) throw std::invalid_argument("harmonic map: only a Euclidean domain metric is supported");
  const int N = target.dim;
  if (c1.empty()) c1 = identity(N, n);
  if (static_cast<int>(c1.size()) != N * n) throw std::invalid_argument("harmonic map: c1 needs N x n entries");
  const VarSpace vs(n, N);
  std::vector<Expr> to_p(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) to_p[static_cast<std::size_t>(k)] = variable(vs.p(k));
  const Christoffel G = christoffel(target);
  std::vector<Expr> asts;
  for (int i = 0; i < N; ++i) {
    Expr a = constant(0.0);
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) {
        const Expr gamma = substitute(G[i][j][k], to_p);
        if (is_const(gamma, 0.0)) continue;
        Expr qq = constant(0.0);
        for (int al = 0; al < n; ++al) qq = add(qq, mul(variable(vs.q(j, al)), variable(vs.q(k, al))));
        a = sub(a, mul(gamma, qq));
      }
    }
    asts.push_back(a);
  }
  ProblemPreset p;
  p.name = "harmonic_map";
  p.description = "harmonic map from flat R^" + std::to_string(n) + " into (R^" + std::to_string(N) + ", " +
                  target.name + ") with prescribed tangent map at 0";
  p.spec = make_spec(n, std::move(asts));
  p.spec.source = print_spec(p.spec);
  p.mode = Mode::Thm12;
  p.c0.assign(static_cast<std::size_t>(N), 0.0);
  p.c1 = std::move(c1);
  p.search = Search::Radius;
  p.expected["certify"] = "admissible";
  p.expected["gradient_at_origin"] = "c1";
  return p;
}

ProblemPreset harmonic_coordinates_system(const MetricSpec& metric) {
  using namespace expr;
  const int n = metric.dim;
  const Matrix3 g0 = metric.eval(Point{});
  if (!positive_definite(g0, n)) throw std::invalid_argument("harmonic coordinates: g(0) is not positive definite");
  Matrix3 A0{};
  {
    XEvaluator ev(inverse_metric(metric), n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A0[i][j] = ev(static_cast<std::size_t>(i * n + j), Point{});
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) A0[i][j] = A0[j][i];
    }
  }
  const EllipticTransform T = elliptic_transform(A0, n);
  // x = M y with M = P^-T; the pulled-back metric is M^T g(M y) M.
  Matrix3 M{};
  bool is_identity = true;
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) {
      M[k][m] = T.P_inv[m][k];
      is_identity = is_identity && M[k][m] == (k == m ? 1.0 : 0.0);
    }
  }
  MetricSpec pulled = metric;
  if (!is_identity) {
    std::vector<Expr> xy(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      Expr s = constant(0.0);
      for (int m = 0; m < n; ++m) s = add(s, mul(constant(M[k][m]), variable(m)));
      xy[static_cast<std::size_t>(k)] = s;
    }
    std::vector<Expr> gx(metric.g.size());
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = substitute(metric.g[i], xy);
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        Expr s = constant(0.0);
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            s = add(s, mul(constant(M[k][a] * M[l][b]), gx[static_cast<std::size_t>(k * n + l)]));
          }
        }
        pulled.g[static_cast<std::size_t>(a * n + b)] = s;
        pulled.g[static_cast<std::size_t>(b * n + a)] = s;
      }
    }
    pulled.name = metric.name + " (normalised at 0)";
  }

  const std::vector<Expr> inv = inverse_metric(pulled);
  const Expr sg = sqrt_det(pulled);
  std::vector<Expr> b(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Expr s = constant(0.0);
    for (int i = 0; i < n; ++i) s = add(s, diff(mul(sg, inv[static_cast<std::size_t>(i * n + j)]), i));
    b[static_cast<std::size_t>(j)] = div(s, sg);
  }
  const VarSpace vs(n, n);
  std::vector<Expr> asts;
  for (int k = 0; k < n; ++k) {
    Expr a = constant(0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const Expr gij = inv[static_cast<std::size_t>(i * n + j)];
        const Expr coeff = i == j ? sub(constant(1.0), gij) : neg(mul(constant(2.0), gij));
        a = add(a, mul(coeff, variable(vs.r(k, i, j))));
      }
    }
    for (int j = 0; j < n; ++j) a = sub(a, mul(b[static_cast<std::size_t>(j)], variable(vs.q(k, j))));
    asts.push_back(a);
  }
  ProblemPreset p;
  p.name = "harmonic_coordinates";
  p.description = "harmonic coordinates of " + metric.name + ", Delta_g x^k = 0 with grad x^k(0) = e_k";
  p.spec = make_spec(n, std::move(asts));
  p.spec.source = print_spec(p.spec);
  p.mode = Mode::Thm12;
  p.c0.assign(static_cast<std::size_t>(n), 0.0);
  p.c1.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) p.c1[static_cast<std::size_t>(k * n + m)] = M[k][m];
  }
  p.search = Search::Radius;
  p.metric = pulled;
  p.expected["certify"] = "admissible";
  p.expected["residual"] = "laplace_beltrami";
  return p;
}

ProblemPreset mean_curvature_system(const std::string& H, int n) {
  const expr::VarSpace vs(n, 1);
  const Expr h = expr::parse(H, vs);
  for (int v : expr::variables(h)) {
    if (vs.kind(v) != expr::VarSpace::Kind::X) {
      throw std::invalid_argument("mean curvature: H may only depend on x, found " + vs.name(v));
    }
  }
  std::string q2 = "1";
  std::string qqr;
  for (int i = 0; i < n; ++i) {
    q2 += " + " + q_name(0, i) + "^2";
    for (int j = i; j < n; ++j) {
      if (!qqr.empty()) qqr += " + ";
      qqr += (i == j ? "" : "2 * ") + q_name(0, i) + " * " + q_name(0, j) + " * " + r_name(0, i, j);
    }
  }
  const std::string text = "a1 = " + std::to_string(n) + " * (" + expr::print(h, vs) + ") * sqrt(" + q2 + ") + (" +
                           qqr + ") / (" + q2 + ")";
  ProblemPreset p;
  p.name = "mean_curvature";
  p.description = "graph of prescribed mean curvature H = " + H;
  p.spec = parse_nonlinearity(text, n, 1);
  const bool minimal = p.spec.at_zero(0) == 0.0;
  p.mode = minimal ? Mode::Thm11 : Mode::Thm12;
  if (!minimal) {
    p.c0 = {0.0};
    p.c1.assign(static_cast<std::size_t>(n), 0.0);
  }
  p.search = Search::Radius;
  p.expected["certify"] = "admissible";
  return p;
}

std::vector<std::string> preset_names() {
  return {"zero",         "quadratic",           "eigenvalue",           "critical_exponent",
          "osserman",     "mean_curvature",      "harmonic_coordinates", "harmonic_map_flat",
          "harmonic_map_conformal"};
}

ProblemPreset make_preset(const std::string& name, int n, const PresetParams& params) {
  if (n < 2 || n > 3) throw std::invalid_argument("presets exist for n = 2 and n = 3");
  auto simple = [&](const std::string& text, Mode mode, const std::string& description) {
    ProblemPreset p;
    p.name = name;
    p.description = description;
    p.spec = parse_nonlinearity(text, n, 1);
    p.mode = mode;
    return p;
  };
  if (name == "zero") {
    ProblemPreset p = simple("a1 = 0", Mode::Thm13, "Delta u = 0; the solution is the seed");
    p.search = Search::None;
    p.expected["certify"] = "admissible";
    p.expected["iterations"] = "1";
    return p;
  }
  if (name == "quadratic") {
    ProblemPreset p = simple("a1 = p1^2", Mode::Thm13, "Delta u = u^2");
    p.search = Search::Gamma;
    p.expected["certify"] = "admissible";
    p.expected["radiality"] = "non_radial";
    return p;
  }
  if (name == "eigenvalue") {
    ProblemPreset p = simple("a1 = " + format_double(params.lambda) + " * p1", Mode::Thm13,
                             "Delta u = lambda u; linear, so grad a(0) != 0");
    p.search = Search::Gamma;
    p.expected["certify"] = "hypothesis_fail";
    return p;
  }
  if (name == "critical_exponent") {
    if (n != 3) throw std::invalid_argument("critical_exponent needs n = 3 (exponent (n + 2) / (n - 2))");
    ProblemPreset p = simple("a1 = " + format_double(params.c) + " * abspow(p1, 5)", Mode::Thm13,
                             "Delta u = c |u|^(n+2)/(n-2)");
    p.search = Search::Gamma;
    p.expected["certify"] = "admissible";
    p.expected["radiality"] = "non_radial";
    p.expected["sign"] = "changes";
    return p;
  }
  if (name == "osserman") {
    ProblemPreset p = simple("a1 = exp(2 * p1)", Mode::Thm12, "Delta u = e^(2u) with u(0) = c0");
    p.c0 = params.c0.empty() ? std::vector<double>{0.0} : params.c0;
    p.c1 = params.c1.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0) : params.c1;
    p.search = Search::Radius;
    p.expected["certify"] = "admissible for small R";
    p.expected["R"] = "shrinks as c0 grows";
    return p;
  }
  if (name == "mean_curvature") {
    ProblemPreset p = mean_curvature_system(params.H, n);
    if (p.mode == Mode::Thm12) {
      if (!params.c0.empty()) p.c0 = params.c0;
      if (!params.c1.empty()) p.c1 = params.c1;
    }
    return p;
  }
  if (name == "harmonic_coordinates") {
    const std::string text = n == 2 ? "g11 = 1 + x1^2\ng22 = 1\n" : "g11 = 1 + x1^2\ng22 = 1\ng33 = 1\n";
    return harmonic_coordinates_system(params.metric ? *params.metric : parse_metric(text, n, "diag(1 + x1^2, 1)"));
  }
  if (name == "harmonic_map_flat" || name == "harmonic_map_conformal") {
    MetricSpec target;
    if (params.metric) {
      target = *params.metric;
    } else if (name == "harmonic_map_flat") {
      target = euclidean_metric(n);
    } else {
      std::string text;
      for (int i = 1; i <= n; ++i) text += "g" + std::to_string(i) + std::to_string(i) + " = exp(2 * x1)\n";
      target = parse_metric(text, n, "exp(2 x1) I");
    }
    ProblemPreset p = harmonic_map_system(euclidean_metric(n), target, n, params.c1);
    p.name = name;
    if (name == "harmonic_map_flat") p.seed = "zero";
    if (name == "harmonic_map_flat" && !params.metric) {
      p.expected["solution"] = "c1 x";
      p.expected["iterations"] = "1";
    }
    return p;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<ProblemPreset> preset_catalog(int n) {
  std::vector<ProblemPreset> out;
  for (const std::string& name : preset_names()) {
    if (name == "critical_exponent" && n != 3) continue;
    out.push_back(make_preset(name, n));
  }
  return out;
}

double laplace_beltrami_residual(const MetricSpec& metric, const GridField& u) {
  const QuadGrid& grid = u.grid();
  const int n = grid.dim();
  if (metric.dim != n) throw std::invalid_argument("laplace_beltrami_residual: metric dimension differs from the grid");
  std::vector<Expr> trees = inverse_metric(metric);
  trees.push_back(sqrt_det(metric));
  const auto sg_index = static_cast<std::size_t>(n * n);
  // sqrt g g^ij and sqrt g at every node
  std::vector<double> coeff(grid.size() * (sg_index + 1));
  {
    XEvaluator ev(trees, n);
    for (std::size_t v = 0; v < grid.size(); ++v) {
      const Point& x = grid.nodes()[v];
      const double sg = ev(sg_index, x);
      for (std::size_t t = 0; t < sg_index; ++t) coeff[v * (sg_index + 1) + t] = sg * ev(t, x);
      coeff[v * (sg_index + 1) + sg_index] = sg;
    }
  }
  double worst = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    const GridField uc = u.component(c);
    std::vector<GridField> grad;
    for (int j = 0; j < n; ++j) grad.push_back(derivative(uc, unit_index(j)));
    GridField div(u.grid_ptr(), 1, u.alpha());
    for (int i = 0; i < n; ++i) {
      GridField flux(u.grid_ptr(), 1, u.alpha());
      for (std::size_t v = 0; v < grid.size(); ++v) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += coeff[v * (sg_index + 1) + static_cast<std::size_t>(i * n + j)] * grad[static_cast<std::size_t>(j)].at(v, 0);
        flux.at(v, 0) = s;
      }
      div += derivative(flux, unit_index(i));
    }
    for (std::size_t v = 0; v < grid.size(); ++v) {
      if (!grid.interior(v)) continue;
      worst = std::max(worst, std::abs(div.at(v, 0) / coeff[v * (sg_index + 1) + sg_index]));
    }
  }
  return worst;
}

}  // namespace nlpoisson
