#include <cmath>

#include "doctest.h"
#include "nlpoisson/certificate.hpp"
#include "nlpoisson/errors.hpp"

using namespace nlpoisson;

namespace {

CertifyOptions with_cop(double c = 0.75) {
  CertifyOptions o;
  o.c_op = c;
  return o;
}

}  // namespace

TEST_CASE("box bounds") {
  const EBox box{2, 1, 0.1, 1.0};
  CHECK(box.p_bound() == doctest::Approx(18 * 0.01));
  CHECK(box.q_bound() == doctest::Approx(0.6));
  CHECK(box.r_bound() == 2.0);
  const EBox bigger{2, 1, 0.2, 2.0};
  CHECK(bigger.p_bound() > box.p_bound());
  CHECK(bigger.q_bound() > box.q_bound());
  CHECK(bigger.r_bound() > box.r_bound());
  CHECK(EBox{3, 1, 1e-9, 1e-9}.p_bound() < 1e-25);
}

TEST_CASE("constant table examples") {
  const EBox box{2, 1, 0.1, 1.0};
  const auto sq = bound_constants(parse_nonlinearity("a1 = p1^2", 2), box);
  // sup |2p| over |p| <= C_p R^2 gamma
  CHECK(sq.A == doctest::Approx(0.36));
  CHECK(sq.B == 0.0);
  CHECK(sq.C == 0.0);
  CHECK(sq.D == 0.0);
  CHECK(sq.H1A == 0.0);
  CHECK(sq.label == "lower-bound-empirical");

  const auto zero = bound_constants(parse_nonlinearity("a1 = 0", 2), box);
  CHECK(zero.A + zero.B + zero.C + zero.D + zero.HA + zero.HB + zero.HC + zero.HD == 0.0);
  CHECK(zero.H1A + zero.H1B + zero.H1C + zero.H1D + zero.a0 == 0.0);

  for (double gamma : {0.5, 1.0, 3.0}) {
    const auto rr = bound_constants(parse_nonlinearity("a1 = r1_11^2", 2), EBox{2, 1, 0.1, gamma});
    CHECK(rr.C == doctest::Approx(4 * gamma));
    CHECK(rr.H1C == doctest::Approx(2.0));
    CHECK(rr.HC == 0.0);
  }

  // x-dependence lands in D; sampling respects the ball, not the cube.
  const auto xd = bound_constants(parse_nonlinearity("a1 = x1^2 + x2^2", 2), EBox{2, 1, 0.5, 1.0});
  CHECK(xd.D == doctest::Approx(1.0));
  CHECK(bound_constants(parse_nonlinearity("a1 = exp(2*p1)", 2), box).a0 == 1.0);
}

TEST_CASE("Hoelder constant of a linear partial") {
  // d a/d p = 2 p: l1 gradient 2, osc 4 p_bound, diam 2 max(R, p_bound).
  const EBox box{2, 1, 1.0, 1e-3};
  const auto t = bound_constants(parse_nonlinearity("a1 = p1^2", 2), box);
  const double osc = 4 * box.p_bound();
  const double expect = std::min(2.0 * std::sqrt(2.0), std::sqrt(2.0) * std::sqrt(osc));
  CHECK(t.HA == doctest::Approx(expect));
}

TEST_CASE("non-C1 partials and domain errors") {
  const EBox box{2, 1, 0.1, 1.0};
  CHECK_THROWS_AS(bound_constants(parse_nonlinearity("a1 = abs(p1)", 2), box), DomainError);
  CHECK_THROWS_AS(bound_constants(parse_nonlinearity("a1 = ln(p1)", 2), box), DomainError);
  // The partial of |p|^1.5 is not C^1 itself, so its gradient is differenced.
  const auto t = bound_constants(parse_nonlinearity("a1 = abspow(p1, 1.5)", 2), box);
  CHECK(t.A == doctest::Approx(1.5 * std::pow(box.p_bound(), 0.5)));
  CHECK(t.HA > 0.0);
}

TEST_CASE("nesting monotonicity of the table") {
  const char* systems[] = {
      "a1 = p1^2 + x1 * q1_2",
      "a1 = sin(p1) * r1_12 + q1_1^2",
      "a1 = exp(p1) - 1 - p1 + x2 * r1_22^2",
  };
  const EBox boxes[] = {{2, 1, 0.1, 0.1}, {2, 1, 0.2, 0.5}, {2, 1, 0.4, 1.0}};
  for (const char* s : systems) {
    const auto spec = parse_nonlinearity(s, 2);
    ConstantTable prev;
    bool first = true;
    for (const auto& b : boxes) {
      const auto t = bound_constants(spec, b);
      if (!first) {
        CAPTURE(s);
        CHECK(t.A >= prev.A);
        CHECK(t.B >= prev.B);
        CHECK(t.C >= prev.C);
        CHECK(t.D >= prev.D);
        CHECK(t.HA >= prev.HA);
        CHECK(t.HB >= prev.HB);
        CHECK(t.HC >= prev.HC);
        CHECK(t.HD >= prev.HD);
        CHECK(t.H1A >= prev.H1A);
        CHECK(t.H1B >= prev.H1B);
        CHECK(t.H1C >= prev.H1C);
        CHECK(t.H1D >= prev.H1D);
      }
      prev = t;
      first = false;
    }
  }
}

TEST_CASE("delta and eta arithmetic") {
  const EBox box{2, 1, 0.5, 0.25};
  const auto zero = delta_eta(ConstantTable{}, 0.8, aggregation_constant(2, 1), box, 0.5);
  CHECK(zero.delta == 0.0);
  CHECK(zero.eta == 0.0);
  CHECK(aggregation_constant(2, 1) == 90.0);
  CHECK(aggregation_constant(3, 2) == 10.0 * 40.5 * 2);

  ConstantTable t;
  t.A = 1.0;
  t.HB = 2.0;
  t.H1C = 3.0;
  t.D = 0.5;
  t.a0 = 0.1;
  const double K = 7.0;
  const double c = 0.5;
  const auto de = delta_eta(t, c, K, box, 0.5);
  const double w = std::sqrt(1.0) * (1 + 2 * std::sqrt(3 * 2 * 0.5) * std::sqrt(0.25) + 2 * 0.25);
  CHECK(de.delta_A == doctest::Approx(1.0));
  CHECK(de.delta_B == doctest::Approx(w * 2.0));
  CHECK(de.delta_C == doctest::Approx(2 * 0.25 * 3.0));
  CHECK(de.delta_D == doctest::Approx(0.5));
  CHECK(de.delta == doctest::Approx(c * K * (0.25 * 1.0 + 0.5 * w * 2.0 + 1.5)));
  CHECK(de.eta == doctest::Approx(c * K * (0.1 + 0.5 * 0.5 + 0.25 * de.delta)));

  // Osserman-shifted constant term: eta >= C K |a(0)| whatever the box.
  ConstantTable oss;
  oss.a0 = 1.0;
  for (double R : {1.0, 1e-3, 1e-9}) {
    CHECK(delta_eta(oss, c, K, EBox{2, 1, R, 1e-6}, 0.5).eta >= c * K);
  }
}

TEST_CASE("delta grows with gamma for an r-dependent system") {
  const auto spec = parse_nonlinearity("a1 = r1_11^2", 2);
  const auto opts = with_cop();
  double prev = -1.0;
  for (double g : {0.01, 0.02, 0.04, 0.08}) {
    const auto c = certify(spec, Mode::Thm11, EBox{2, 1, 0.5, g}, opts);
    CHECK(c.bounds.delta > prev);
    prev = c.bounds.delta;
  }
}

TEST_CASE("thm13 limit: delta decreases along gamma = 2^-j") {
  const auto spec = parse_nonlinearity("a1 = p1^2", 2);
  const auto opts = with_cop();
  double prev = INFINITY;
  int below = -1;
  for (int j = 0; j <= 30; ++j) {
    const auto c = certify(spec, Mode::Thm13, EBox{2, 1, 1.0, std::ldexp(1.0, -j)}, opts);
    CHECK(c.bounds.delta < prev);
    prev = c.bounds.delta;
    if (below < 0 && c.bounds.delta < 1.0) below = j;
  }
  CHECK(below >= 0);
  CHECK(below <= 30);
}

TEST_CASE("thm12 limit: delta vanishes as R shrinks at fixed gamma") {
  const auto spec = parse_nonlinearity("a1 = p1^2 + x1 * q1_2 + sin(q1_1)^2", 2);
  const auto opts = with_cop();
  double prev = INFINITY;
  for (int j = 0; j < 20; ++j) {
    const auto c = certify(spec, Mode::Thm12, EBox{2, 1, std::ldexp(1.0, -j), 0.5}, opts);
    CHECK(c.bounds.delta <= prev);
    prev = c.bounds.delta;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("stored certificates recompute bit for bit") {
  const auto spec = parse_nonlinearity("a1 = sin(p1) * q1_2 + x1 * r1_12^2", 2);
  const auto c = certify(spec, Mode::Thm11, EBox{2, 1, 0.3, 0.2}, with_cop());
  const auto again = delta_eta(c.table, c.c_op, c.K, c.box, c.alpha);
  CHECK(again.delta == c.bounds.delta);
  CHECK(again.eta == c.bounds.eta);
  CHECK(again.delta_A == c.bounds.delta_A);
  CHECK(again.delta_D == c.bounds.delta_D);
}

TEST_CASE("search verdicts") {
  const auto opts = with_cop();
  const auto sq = search_admissible(parse_nonlinearity("a1 = p1^2", 2), Mode::Thm13, opts);
  CHECK(sq.admissible);
  CHECK(sq.box.R == 1.0);
  CHECK(sq.steps <= 40);
  CHECK(sq.bounds.delta < 1.0);
  CHECK(sq.bounds.eta < sq.box.gamma / 2);

  const auto eig = search_admissible(parse_nonlinearity("a1 = 2 * p1", 2), Mode::Thm13, opts);
  CHECK_FALSE(eig.admissible);
  CHECK(eig.binding == "hypothesis");
  CHECK(serialize(eig).find("hypothesis: grad a(0) != 0") != std::string::npos);

  const auto zero = search_admissible(parse_nonlinearity("a1 = 0", 2), Mode::Thm13, opts);
  CHECK(zero.admissible);
  CHECK(zero.steps == 1);
  CHECK(zero.box.gamma == 1.0);

  CertifyOptions oss = opts;
  oss.c0 = {3.0};
  oss.c1 = {0.0, 0.0};
  oss.search = Search::None;
  const auto refused = search_admissible(parse_nonlinearity("a1 = exp(2*p1)", 2), Mode::Thm12, oss);
  CHECK_FALSE(refused.admissible);
  CHECK(refused.table.a0 == doctest::Approx(std::exp(6.0)));

  CHECK_THROWS_AS(search_admissible(parse_nonlinearity("a1 = p1^2", 2), Mode::Thm13, oss),
                  std::invalid_argument);
}

TEST_CASE("Osserman: admissible R shrinks as u(0) grows") {
  const auto spec = parse_nonlinearity("a1 = exp(2*p1)", 2);
  double prev = INFINITY;
  for (double c0 : {0.0, 1.0, 2.0}) {
    CertifyOptions o = with_cop();
    o.c0 = {c0};
    o.c1 = {0.0, 0.0};
    const auto c = search_admissible(spec, Mode::Thm12, o);
    REQUIRE(c.admissible);
    CHECK(c.box.R < prev);
    prev = c.box.R;
  }
}

TEST_CASE("sweep rows cover the lattice") {
  CertifyOptions o = with_cop();
  o.max_steps = 8;
  const auto rows = sweep(parse_nonlinearity("a1 = p1^2", 2), Mode::Thm13, o);
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].gamma == rows[i - 1].gamma / 2);
    CHECK(rows[i].delta < rows[i - 1].delta);
  }
  o.search = Search::Both;
  o.max_steps = 3;
  CHECK(sweep(parse_nonlinearity("a1 = 0", 2), Mode::Thm13, o).size() == 9);
  for (const auto& r : sweep(parse_nonlinearity("a1 = 0", 2), Mode::Thm13, o)) CHECK(r.admissible);
  for (const auto& r : sweep(parse_nonlinearity("a1 = p1", 2), Mode::Thm13, o)) CHECK(r.binding == "hypothesis");
}

TEST_CASE("operator constant is cached and positive") {
  const double a = operator_constant(2);
  CHECK(a > 0.5);  // f = 1 alone gives 1/n
  CHECK(operator_constant(2) == a);
}
