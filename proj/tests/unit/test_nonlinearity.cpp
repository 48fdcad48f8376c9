#include <cmath>
#include <random>

#include "doctest.h"
#include "nlpoisson/errors.hpp"
#include "nlpoisson/nonlinearity.hpp"

using namespace nlpoisson;

TEST_CASE("parse single and multi-component systems") {
  const auto spec = parse_nonlinearity("a1 = p1^2", 2);
  CHECK(spec.components == 1);
  CHECK_FALSE(spec.depends_on_r[0]);
  CHECK_FALSE(spec.depends_on_x[0]);
  CHECK(expr::equal(spec.asts[0], expr::pow(expr::variable(spec.vars.p(0)), expr::constant(2))));

  const auto sym = parse_nonlinearity("a1 = r1_12 - r1_21", 2);
  CHECK(expr::is_const(sym.asts[0], 0.0));
  CHECK_FALSE(sym.depends_on_r[0]);

  const auto sys = parse_nonlinearity(
      "# a comment\n"
      "a2 = x1 * q1_2   # trailing comment\n"
      "\n"
      "a1 = exp(2*p1) - 1 - 2*p1\n",
      3);
  CHECK(sys.components == 2);
  CHECK(sys.depends_on_x[1]);
  CHECK_FALSE(sys.depends_on_x[0]);
  CHECK(parse_nonlinearity(print_spec(sys), 3).source == print_spec(sys));
}

TEST_CASE("system-level parse errors") {
  auto where = [](const char* src, int dim, int comps = 0) {
    try {
      parse_nonlinearity(src, dim, comps);
    } catch (const ParseError& e) {
      return std::make_pair(e.line(), e.column());
    }
    return std::make_pair(0, 0);
  };
  CHECK(where("a1 = p1 +", 2) == std::make_pair(1, 10));
  CHECK(where("a1 = p1\na1 = p1", 2) == std::make_pair(2, 1));
  CHECK(where("a2 = p1", 2).first != 0);
  CHECK(where("b1 = p1", 2) == std::make_pair(1, 1));
  CHECK(where("a1 p1", 2) == std::make_pair(1, 4));
  CHECK(where("a1 = p1\n  a2 = q3_1", 2) == std::make_pair(2, 8));
  CHECK(where("a1 = p1 / (x1 - x1)", 2).first == 1);
  CHECK(where("a1 = p1\na2 = p2", 2, 1).first == 2);
  CHECK(where("", 2) == std::make_pair(1, 1));
}

TEST_CASE("spec derivative examples") {
  const auto sq = parse_nonlinearity("a1 = p1^2", 2);
  CHECK(expr::equal(diff(sq, 0, sq.vars.p(0)),
                    expr::mul(expr::constant(2), expr::variable(sq.vars.p(0)))));
  const auto rr = parse_nonlinearity("a1 = r1_12^2", 2);
  const int r12 = rr.vars.r(0, 0, 1);
  CHECK(expr::equal(diff(rr, 0, r12), expr::mul(expr::constant(2), expr::variable(r12))));
  const auto oss = parse_nonlinearity("a1 = exp(2*p1)", 2);
  CHECK(oss.vars.size() == 2 + 1 + 2 + 3);
  const std::vector<double> zero(8, 0.0);
  CHECK(expr::Compiled(diff(oss, 0, oss.vars.p(0)), oss.vars)(zero) == doctest::Approx(2.0));
  CHECK_THROWS_AS(diff(parse_nonlinearity("a1 = abs(p1)", 2), 0, 2), DomainError);
}

TEST_CASE("symbolic partials match finite differences over the box") {
  // 200 random points, relative error <= 1e-6 with step 1e-5 * scale.
  const auto spec = parse_nonlinearity(
      "a1 = exp(p1) * q2_1 - sin(x2) * p2^3 + r1_12 * q1_1 / (2 + p2^2)\n"
      "a2 = sqrt(1 + q1_2^2) * cos(p1) + abspow(p2, 2.5) - r2_11 * r2_22\n",
      2);
  const auto& vs = spec.vars;
  const CompiledSpec code(spec);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(static_cast<std::size_t>(vs.size()));
    for (double& x : v) x = u(rng);
    for (int c = 0; c < 2; ++c) {
      for (int var = 0; var < vs.size(); ++var) {
        const double scale = std::max(1.0, std::abs(v[static_cast<std::size_t>(var)]));
        const double h = 1e-5 * scale;
        auto up = v;
        auto dn = v;
        up[static_cast<std::size_t>(var)] += h;
        dn[static_cast<std::size_t>(var)] -= h;
        const double fd = (code.eval(c, up) - code.eval(c, dn)) / (2 * h);
        const double sym = expr::Compiled(diff(spec, c, var), vs)(v);
        worst = std::max(worst, std::abs(sym - fd) / std::max(1.0, std::abs(fd)));
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("r symmetry: evaluation ignores the order of Hessian indices") {
  const auto spec = parse_nonlinearity("a1 = r1_12 * r1_21 + r1_11 - 3 * r1_21", 2);
  const auto& vs = spec.vars;
  CHECK(vs.r(0, 0, 1) == vs.r(0, 1, 0));
  // Only one slot exists for the mixed entry, so transposing the supplied
  // Hessian cannot change the value.
  std::vector<double> v(static_cast<std::size_t>(vs.size()), 0.0);
  v[static_cast<std::size_t>(vs.r(0, 0, 1))] = 0.7;
  v[static_cast<std::size_t>(vs.r(0, 0, 0))] = 0.2;
  CHECK(CompiledSpec(spec).eval(0, v) == doctest::Approx(0.49 + 0.2 - 2.1));
}

TEST_CASE("evaluation along fields") {
  const auto grid = make_grid(BallDomain(2, 1.0), 16);
  const auto u = GridField::scalar(grid, [](const Point& x) { return x[0] * x[0]; });
  const auto a = eval_on_field(parse_nonlinearity("a1 = p1", 2), u);
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK(a.at(i, 0) == doctest::Approx(u.at(i, 0)));
  const auto lap = eval_on_field(parse_nonlinearity("a1 = r1_11 + r1_22", 2), u);
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK(lap.at(i, 0) == doctest::Approx(2.0).epsilon(1e-9));
  const auto zero = GridField(grid, 1);
  const auto one = eval_on_field(parse_nonlinearity("a1 = exp(2*p1)", 2), zero);
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK(one.at(i, 0) == 1.0);
  const auto grad = eval_on_field(parse_nonlinearity("a1 = q1_1", 2), u);
  CHECK(grad.at(grid->origin(), 0) == doctest::Approx(0.0).scale(1.0));

  try {
    eval_on_field(parse_nonlinearity("a1 = ln(x1 + 2) + sqrt(x1)", 2), u);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("node") != std::string::npos);
    CHECK(msg.find("sqrt(x1)") != std::string::npos);
  }
  CHECK_THROWS_AS(eval_on_field(parse_nonlinearity("a1 = p1\na2 = p2", 2), u), std::invalid_argument);
}

TEST_CASE("hypothesis checks per mode") {
  const auto sq = parse_nonlinearity("a1 = p1^2", 2);
  CHECK(hypothesis_check(sq, Mode::Thm13).pass);

  const auto eig = parse_nonlinearity("a1 = 3 * p1", 2);
  const auto er = hypothesis_check(eig, Mode::Thm13);
  CHECK_FALSE(er.pass);
  CHECK(er.grad_a0 == doctest::Approx(3.0));
  REQUIRE(er.failures.size() == 1);
  CHECK(er.failures[0].rfind("grad a(0) != 0", 0) == 0);

  const auto oss = parse_nonlinearity("a1 = exp(2*p1)", 2);
  const auto orep = hypothesis_check(oss, Mode::Thm13);
  CHECK_FALSE(orep.pass);
  CHECK(orep.a0 == doctest::Approx(1.0));
  CHECK(hypothesis_check(oss, Mode::Thm12).pass);

  CHECK_FALSE(hypothesis_check(parse_nonlinearity("a1 = x1 * p1^2", 2), Mode::Thm13).pass);
  CHECK_FALSE(hypothesis_check(parse_nonlinearity("a1 = r1_11^2", 2), Mode::Thm12).pass);
  CHECK(hypothesis_check(parse_nonlinearity("a1 = x1^2 * r1_11", 2), Mode::Thm12).pass);
  CHECK_FALSE(hypothesis_check(parse_nonlinearity("a1 = (1 + x1) * r1_11", 2), Mode::Thm12).pass);

  const auto mc = parse_nonlinearity("a1 = q1_1 * q1_2 * r1_12 / (1 + q1_1^2 + q1_2^2)", 2);
  const auto mr = hypothesis_check(mc, Mode::Thm11, 1e-3);
  CHECK(mr.pass);
  CHECK(mr.grad_r_a0 == 0.0);
  const auto small = parse_nonlinearity("a1 = 0.01 * r1_11 + r1_22^2", 2);
  const auto sr = hypothesis_check(small, Mode::Thm11, 0.1);
  CHECK(sr.grad_r_a0 == doctest::Approx(0.01));
  CHECK(sr.hess_r_a0 == doctest::Approx(2.0));
  CHECK_FALSE(sr.pass);
}

TEST_CASE("thm12 shift moves the initial values to the origin") {
  const auto oss = parse_nonlinearity("a1 = exp(2*p1)", 2);
  const auto shifted = shift_spec(oss, {3.0}, {0.0, 0.0});
  CHECK(shifted.at_zero(0) == doctest::Approx(std::exp(6.0)));
  CHECK_FALSE(shifted.any_x());
  const auto lin = shift_spec(parse_nonlinearity("a1 = p1 * q1_2", 2), {1.0}, {0.5, 2.0});
  CHECK(lin.any_x());
  // a~(0) = (1 + 0) * (0 + 2)
  CHECK(lin.at_zero(0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(shift_spec(oss, {1.0, 2.0}, {0.0, 0.0}), std::invalid_argument);
}
