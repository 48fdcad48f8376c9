#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "nlpoisson/applications.hpp"
#include "nlpoisson/errors.hpp"
#include "nlpoisson/solver.hpp"

using namespace nlpoisson;

namespace {

double eval_x(const expr::Expr& e, int dim, const Point& x) {
  const expr::VarSpace vs(dim, 1);
  std::vector<double> v(static_cast<std::size_t>(vs.size()), 0.0);
  for (int k = 0; k < dim; ++k) v[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
  return expr::Compiled(e, vs)(v);
}

// Christoffel symbols from central differences of the numerically
// evaluated metric and a numeric inverse.
double numeric_christoffel(const MetricSpec& m, const Point& x, int i, int j, int k) {
  const int n = m.dim;
  const double h = 1e-5;
  auto dg = [&](int a, int b, int c) {
    Point xp = x, xm = x;
    xp[static_cast<std::size_t>(c)] += h;
    xm[static_cast<std::size_t>(c)] -= h;
    return (m.eval(xp)[a][b] - m.eval(xm)[a][b]) / (2 * h);
  };
  const Matrix3 g = m.eval(x);
  Matrix3 inv{};
  if (n == 2) {
    const double d = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    inv[0][0] = g[1][1] / d;
    inv[1][1] = g[0][0] / d;
    inv[0][1] = -g[0][1] / d;
    inv[1][0] = -g[1][0] / d;
  } else {
    // Gauss-Jordan on a copy
    Matrix3 a = g;
    for (int r = 0; r < 3; ++r) inv[r][r] = 1.0;
    for (int c = 0; c < 3; ++c) {
      const double piv = a[c][c];
      for (int t = 0; t < 3; ++t) {
        a[c][t] /= piv;
        inv[c][t] /= piv;
      }
      for (int r = 0; r < 3; ++r) {
        if (r == c) continue;
        const double f = a[r][c];
        for (int t = 0; t < 3; ++t) {
          a[r][t] -= f * a[c][t];
          inv[r][t] -= f * inv[c][t];
        }
      }
    }
  }
  double s = 0.0;
  for (int l = 0; l < n; ++l) s += inv[i][l] * (dg(l, j, k) + dg(l, k, j) - dg(j, k, l));
  return 0.5 * s;
}

}  // namespace

TEST_CASE("christoffel symbols of a flat metric vanish") {
  for (int n : {2, 3}) {
    const auto G = christoffel(euclidean_metric(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) CHECK(expr::is_const(G[i][j][k], 0.0));
      }
    }
  }
}

TEST_CASE("christoffel symbols of polar and conformal metrics") {
  // degenerate at 0, so built by hand rather than parsed
  MetricSpec polar = euclidean_metric(2);
  polar.g[3] = expr::parse("x1^2", expr::VarSpace(2, 1));
  CHECK_THROWS_AS(christoffel(polar), std::invalid_argument);
  const auto G = christoffel(polar, false);
  for (double r : {0.3, 1.0, 2.5}) {
    const Point x{r, 0.7, 0.0};
    CHECK(eval_x(G[1][0][1], 2, x) == doctest::Approx(1.0 / r));
    CHECK(eval_x(G[0][1][1], 2, x) == doctest::Approx(-r));
    CHECK(eval_x(G[0][0][0], 2, x) == 0.0);
  }

  const auto conformal = parse_metric("g11 = exp(2 * x1)\ng22 = exp(2 * x1)", 2, "conformal");
  const auto C = christoffel(conformal);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const Point x{u(rng), u(rng), 0.0};
    CHECK(eval_x(C[0][0][0], 2, x) == doctest::Approx(1.0));
    CHECK(eval_x(C[0][1][1], 2, x) == doctest::Approx(-1.0));
    CHECK(eval_x(C[1][0][1], 2, x) == doctest::Approx(1.0));
    CHECK(eval_x(C[1][0][0], 2, x) == doctest::Approx(0.0));
    CHECK(eval_x(C[0][0][1], 2, x) == doctest::Approx(0.0));
    CHECK(eval_x(C[1][1][1], 2, x) == doctest::Approx(0.0));
  }
}

TEST_CASE("christoffel symbols match a numeric oracle and are symmetric") {
  const auto m = parse_metric(
      "g11 = 2 + sin(x1 * x2)\ng12 = 0.3 * x3\ng22 = 1 + x1^2\ng23 = 0.1 * cos(x1)\ng33 = exp(x2)", 3, "general");
  const auto G = christoffel(m);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int t = 0; t < 1000; ++t) {
    const Point x{u(rng), u(rng), u(rng)};
    const int i = t % 3, j = (t / 3) % 3, k = (t / 9) % 3;
    CHECK(expr::equal(G[i][j][k], G[i][k][j]));
    if (t < 60) {
      CHECK(eval_x(G[i][j][k], 3, x) == doctest::Approx(numeric_christoffel(m, x, i, j, k)).epsilon(1e-6));
    }
  }
}

TEST_CASE("metric parsing") {
  const auto m = parse_metric("g12 = 0.5 * x1\n# comment\ng11 = 2", 2);
  CHECK(eval_x(m.at(1, 0), 2, Point{2.0, 0.0, 0.0}) == 1.0);
  CHECK(expr::is_const(m.at(1, 1), 1.0));
  CHECK_FALSE(m.is_euclidean());
  CHECK(euclidean_metric(3).is_euclidean());
  CHECK_THROWS_AS(parse_metric("g12 = x1\ng21 = x2", 2), ParseError);
  CHECK_THROWS_AS(parse_metric("g13 = 1", 2), ParseError);
  CHECK_THROWS_AS(parse_metric("g11 = p1", 2), ParseError);
  CHECK_THROWS_AS(parse_metric("g11 = x1 +", 2), ParseError);
  CHECK_THROWS_AS(parse_metric("g11 = -1", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_metric("g12 = 2", 2), std::invalid_argument);
}

TEST_CASE("harmonic map systems") {
  const auto flat = harmonic_map_system(euclidean_metric(2), euclidean_metric(2), 2, {});
  CHECK(flat.mode == Mode::Thm12);
  for (const auto& a : flat.spec.asts) CHECK(expr::is_const(a, 0.0));
  CHECK(flat.c1 == std::vector<double>{1, 0, 0, 1});

  const auto target = parse_metric("g11 = exp(2 * x1)\ng22 = exp(2 * x1)", 2, "conformal");
  const auto conf = harmonic_map_system(euclidean_metric(2), target, 2, {1, 0, 0, 1});
  CHECK_FALSE(expr::is_const(conf.spec.asts[0]));
  CHECK_FALSE(conf.spec.any_r());
  const auto shifted = shift_spec(conf.spec, conf.c0, conf.c1);
  CHECK(hypothesis_check(shifted, Mode::Thm12).pass);
  // a^1 = -(q^1 . q^1) + (q^2 . q^2), a^2 = -2 q^1 . q^2 with unit Christoffels
  const expr::VarSpace& vs = conf.spec.vars;
  std::vector<double> v(static_cast<std::size_t>(vs.size()), 0.0);
  v[static_cast<std::size_t>(vs.q(0, 0))] = 0.3;
  v[static_cast<std::size_t>(vs.q(1, 1))] = 0.2;
  v[static_cast<std::size_t>(vs.q(1, 0))] = 0.1;
  const CompiledSpec cs(conf.spec);
  CHECK(cs.eval(0, v) == doctest::Approx(-0.09 + 0.05));
  CHECK(cs.eval(1, v) == doctest::Approx(-2 * 0.03));

  CHECK_THROWS_AS(harmonic_map_system(target, target, 2, {}), std::invalid_argument);
  CHECK_THROWS_AS(harmonic_map_system(euclidean_metric(2), target, 2, {1, 0}), std::invalid_argument);
}

TEST_CASE("harmonic coordinate systems") {
  const auto flat = harmonic_coordinates_system(euclidean_metric(3));
  for (const auto& a : flat.spec.asts) CHECK(expr::is_const(a, 0.0));
  CHECK(flat.c1 == std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1});

  const auto bent = make_preset("harmonic_coordinates", 2);
  CHECK(bent.mode == Mode::Thm12);
  CHECK(bent.spec.any_r());
  CHECK(hypothesis_check(bent.spec, Mode::Thm12).pass);
  REQUIRE(bent.metric);

  // constant g = diag(4, 1): y = P^T x with P = diag(2, 1), x1 = y1 / 2
  const auto scaled = harmonic_coordinates_system(parse_metric("g11 = 4", 2));
  for (const auto& a : scaled.spec.asts) CHECK(expr::is_const(a, 0.0));
  CHECK(scaled.c1 == std::vector<double>{0.5, 0, 0, 1});
  const Matrix3 g0 = scaled.metric->eval(Point{});
  CHECK(g0[0][0] == doctest::Approx(1.0));
  CHECK(g0[1][1] == doctest::Approx(1.0));
}

TEST_CASE("mean curvature systems") {
  const auto minimal = mean_curvature_system("0", 2);
  CHECK(minimal.mode == Mode::Thm11);
  const auto h = hypothesis_check(minimal.spec, Mode::Thm11, 0.1);
  CHECK(h.pass);
  CHECK(h.grad_r_a0 == 0.0);
  CHECK(h.hess_r_a0 == 0.0);

  const auto constant = mean_curvature_system("0.5", 3);
  CHECK(constant.mode == Mode::Thm12);
  CHECK(constant.spec.at_zero(0) == doctest::Approx(1.5));
  CHECK_THROWS(mean_curvature_system("p1", 2));

  // a at a hand-picked point: q = (0.3, 0.4), r11 = 1, r12 = 2, r22 = 3, H = 0.5 + x1
  const auto vary = mean_curvature_system("0.5 + x1", 2);
  const auto& vs = vary.spec.vars;
  std::vector<double> v(static_cast<std::size_t>(vs.size()), 0.0);
  v[static_cast<std::size_t>(vs.x(0))] = 0.1;
  v[static_cast<std::size_t>(vs.q(0, 0))] = 0.3;
  v[static_cast<std::size_t>(vs.q(0, 1))] = 0.4;
  v[static_cast<std::size_t>(vs.r(0, 0, 0))] = 1;
  v[static_cast<std::size_t>(vs.r(0, 0, 1))] = 2;
  v[static_cast<std::size_t>(vs.r(0, 1, 1))] = 3;
  const double q2 = 0.25;
  const double expected = 2 * 0.6 * std::sqrt(1 + q2) + (0.09 * 1 + 2 * 0.12 * 2 + 0.16 * 3) / (1 + q2);
  CHECK(CompiledSpec(vary.spec).eval(0, v) == doctest::Approx(expected));
}

TEST_CASE("preset catalogue") {
  for (int n : {2, 3}) {
    const auto cat = preset_catalog(n);
    CHECK(cat.size() >= 5);
    std::set<std::string> names;
    for (const auto& p : cat) names.insert(p.name);
    CHECK(names.size() == cat.size());
    for (const char* required : {"osserman", "eigenvalue", "zero", "quadratic"}) CHECK(names.count(required));
    CHECK(names.count("critical_exponent") == (n == 3 ? 1u : 0u));
  }
  const auto crit = make_preset("critical_exponent", 3);
  CHECK(print_spec(crit.spec) == "a1 = abspow(p1, 5)\n");
  CHECK_THROWS_AS(make_preset("critical_exponent", 2), std::invalid_argument);
  const auto eig = make_preset("eigenvalue", 2);
  CHECK_FALSE(hypothesis_check(eig.spec, Mode::Thm13).pass);
  PresetParams pp;
  pp.c0 = {2.0};
  CHECK(make_preset("osserman", 2, pp).c0 == std::vector<double>{2.0});
  CHECK_THROWS_AS(make_preset("nonsense", 2), std::invalid_argument);
}

TEST_CASE("laplace beltrami residual") {
  const auto grid = make_grid(BallDomain(2, 1.0), 32);
  const auto saddle = GridField::scalar(grid, [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; });
  CHECK(laplace_beltrami_residual(euclidean_metric(2), saddle) < 1e-10);

  // Delta_g x1 = -x1 / (1 + x1^2)^2 for g = diag(1 + x1^2, 1)
  const auto g = parse_metric("g11 = 1 + x1^2", 2);
  const auto x1 = GridField::scalar(grid, [](const Point& x) { return x[0]; });
  double expected = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (!grid->interior(i)) continue;
    const double t = grid->nodes()[i][0];
    expected = std::max(expected, std::abs(t) / ((1 + t * t) * (1 + t * t)));
  }
  CHECK(laplace_beltrami_residual(g, x1) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("flat harmonic map returns the linear map") {
  const auto p = make_preset("harmonic_map_flat", 2);
  CertifyOptions o;
  o.c0 = p.c0;
  o.c1 = p.c1;
  o.c_op = 0.75;
  const auto cert = certify(p.spec, p.mode, EBox{2, 2, 1.0, 1.0}, o);
  REQUIRE(cert.admissible);
  const auto seed = make_seed(p.mode, 1.0, 2, 2, {Matrix3{}, Matrix3{}}, p.c0, p.c1);
  SolveOptions so;
  so.resolution = 16;
  const auto rep = solve(p.spec, p.mode, seed, cert, so);
  CHECK(rep.iterations == 1);
  CHECK(rep.final_residual <= rep.stencil_tol);
  for (std::size_t i = 0; i < rep.solution->size(); ++i) {
    const Point& x = rep.solution->grid().nodes()[i];
    CHECK(rep.solution->at(i, 0) == x[0]);
    CHECK(rep.solution->at(i, 1) == x[1]);
  }
}

TEST_CASE("harmonic coordinates of a bent metric") {
  const auto p = make_preset("harmonic_coordinates", 2);
  CertifyOptions o;
  o.c0 = p.c0;
  o.c1 = p.c1;
  o.c_op = 0.75;
  o.R = 0.125;
  o.search = Search::Radius;
  const auto cert = search_admissible(p.spec, p.mode, o);
  REQUIRE(cert.admissible);
  const double g0 = cert.box.gamma;
  const auto seed = make_seed(p.mode, g0, 2, 2, default_seed_coefficients(2, 2, g0), p.c0, p.c1);
  SolveOptions so;
  so.resolution = 16;
  const auto rep = solve(p.spec, p.mode, seed, cert, so);
  CHECK(rep.converged);
  CHECK(laplace_beltrami_residual(*p.metric, *rep.solution) <= 5e-2);
  CHECK(rep.gradient_at_origin[0] == doctest::Approx(1.0));
  CHECK(std::abs(rep.gradient_at_origin[1]) <= 10 * rep.stencil_tol);
}
