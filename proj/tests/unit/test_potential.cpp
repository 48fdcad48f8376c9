#include <cmath>
#include <random>

#include "doctest.h"
#include "nlpoisson/potential.hpp"
#include "support.hpp"

using namespace nlpoisson;
using testing_support::TrigPoly;

namespace {

// Closed form of N(1) with Delta N(1) = 1 (zero boundary-free potential of the ball).
double potential_of_one(int n, double radius, const Point& x) {
  double r2 = 0.0;
  for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
  if (n == 3) return r2 / 6 - radius * radius / 2;
  return r2 / 4 + radius * radius / 2 * (std::log(radius) - 0.5);
}

double closed_form_error(int n, double radius, int m) {
  const auto g = make_grid(BallDomain(n, radius), m);
  const PotentialField pot = newtonian(GridField::scalar(g, [](const Point&) { return 1.0; }),
                                       HessianMode::None);
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double exact = potential_of_one(n, radius, g->nodes()[i]);
    err = std::max(err, std::abs(pot.base.at(i, 0) - exact));
    ref = std::max(ref, std::abs(exact));
  }
  return err / ref;
}

}  // namespace

TEST_CASE("packed symmetric index") {
  CHECK(sym_pairs(2) == 3);
  CHECK(sym_pairs(3) == 6);
  CHECK(sym_index(3, 0, 0) == 0);
  CHECK(sym_index(3, 0, 2) == 2);
  CHECK(sym_index(3, 1, 1) == 3);
  CHECK(sym_index(3, 2, 1) == 4);
  CHECK(sym_index(3, 2, 2) == 5);
  CHECK(sym_index(2, 1, 0) == 1);
}

TEST_CASE("potential of a constant matches the closed form") {
  CHECK(closed_form_error(2, 1.0, 16) < 2e-3);
  CHECK(closed_form_error(2, 0.5, 32) < 1e-3);
  CHECK(closed_form_error(3, 0.5, 16) < 2e-3);
}

TEST_CASE("potential of a constant at the origin, n = 3") {
  const auto g = make_grid(BallDomain(3, 1.0), 16);
  const PotentialField pot =
      newtonian(GridField::scalar(g, [](const Point&) { return 1.0; }), HessianMode::None);
  CHECK(pot.base.at(g->origin(), 0) == doctest::Approx(-0.5).epsilon(2e-3));
}

TEST_CASE("Hessian of a constant's potential is delta_ij c / n") {
  for (int n : {2, 3}) {
    const auto g = make_grid(BallDomain(n, 1.0), n == 2 ? 32 : 12);
    const double c = -1.7;
    const PotentialField pot = newtonian(GridField::scalar(g, [&](const Point&) { return c; }));
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (!g->interior(i)) continue;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          CHECK(pot.hess_at(i, 0, a, b) == doctest::Approx(a == b ? c / n : 0.0));
        }
      }
    }
    CHECK(pot.origin_hessian[0][0][0] == doctest::Approx(c / n));
  }
}

TEST_CASE("trace identity holds to round-off at interior nodes") {
  const auto g = make_grid(BallDomain(2, 1.0), 32);
  std::mt19937_64 rng(9);
  const GridField f = GridField::scalar(g, TrigPoly(rng, 1.0));
  const PotentialField pot = newtonian(f);
  CHECK(laplacian_identity_residual(f, pot) < 1e-12 * sup_norm(f) * 100);
}

TEST_CASE("finite-difference Laplacian of the potential converges") {
  auto residual = [](int m) {
    const auto g = make_grid(BallDomain(2, 1.0), m);
    const GridField f = GridField::scalar(g, [](const Point& x) { return std::sin(x[0]); });
    return fd_laplacian_residual(f, newtonian(f, HessianMode::None));
  };
  const double r32 = residual(32);
  CHECK(r32 < 5e-2);
  CHECK(residual(64) <= 0.6 * r32);
}

TEST_CASE("subtraction-formula Hessian agrees with finite differences inside") {
  const auto g = make_grid(BallDomain(2, 1.0), 32);
  const GridField f = GridField::scalar(g, [](const Point& x) { return std::cos(x[0]) * std::exp(x[1]); });
  const PotentialField pot = newtonian(f);
  const GridField fd = derivative(pot.base, pair_index(0, 1));
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Point& x = g->nodes()[i];
    if (std::hypot(x[0], x[1]) > 0.5) continue;
    CHECK(std::abs(pot.hess_at(i, 0, 0, 1) - fd.at(i, 0)) < 2e-2);
    CHECK(pot.hess_at(i, 0, 1, 0) == pot.hess_at(i, 0, 0, 1));
  }
}

TEST_CASE("potential is linear") {
  const auto g = make_grid(BallDomain(3, 1.0), 10);
  std::mt19937_64 rng(2);
  const GridField f = GridField::scalar(g, TrigPoly(rng, 1.0));
  const GridField h = GridField::scalar(g, TrigPoly(rng, 1.0));
  const NewtonianOperator op(g);
  const PotentialField lhs = op.apply(2.0 * f + (-3.0) * h);
  const PotentialField pf = op.apply(f);
  const PotentialField ph = op.apply(h);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(lhs.base.at(i, 0) == doctest::Approx(2 * pf.base.at(i, 0) - 3 * ph.base.at(i, 0)));
    CHECK(lhs.hess_at(i, 0, 0, 2) ==
          doctest::Approx(2 * pf.hess_at(i, 0, 0, 2) - 3 * ph.hess_at(i, 0, 0, 2)).epsilon(1e-9));
  }
}

TEST_CASE("vector fields are handled component-wise") {
  const auto g = make_grid(BallDomain(2, 1.0), 16);
  const GridField v = GridField::sample(g, 2, [](const Point& x, std::span<double> out) {
    out[0] = x[0];
    out[1] = 1.0;
  });
  const PotentialField pv = newtonian(v);
  const PotentialField p1 = newtonian(v.component(1));
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(pv.base.at(i, 1) == p1.base.at(i, 0));
  }
}

TEST_CASE("grid mismatch is rejected") {
  const auto g = make_grid(BallDomain(2, 1.0), 8);
  const auto other = make_grid(BallDomain(2, 1.0), 8);
  CHECK_THROWS_AS(NewtonianOperator(g).apply(GridField(other, 1)), std::invalid_argument);
}

TEST_CASE("operator probe") {
  const auto g = make_grid(BallDomain(2, 1.0), 16);
  const OperatorProbe probe = operator_norm_probe(4, g);
  REQUIRE(probe.ratios.size() == 4);
  // f = 1: constant Hessian delta_ij / n, so the ratio is 1/n.
  CHECK(probe.ratios[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(probe.c_hat >= 0.5);
  CHECK_THROWS_AS(operator_norm_probe(0, g), std::invalid_argument);
}
