#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlpoisson/errors.hpp"
#include "nlpoisson/kernels.hpp"

using namespace nlpoisson;

namespace {

// Midpoint rule for the radial integral of Gamma over B_rho.
double radial_quadrature(const Kernel& k, double rho) {
  const int steps = 200000;
  const double dr = rho / steps;
  double sum = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double r = (s + 0.5) * dr;
    const double shell = k.dim() == 2 ? 2 * std::numbers::pi * r : 4 * std::numbers::pi * r * r;
    sum += k.gamma({r, 0.0, 0.0}) * shell * dr;
  }
  return sum;
}

}  // namespace

TEST_CASE("gamma values") {
  CHECK(Kernel(3).gamma({1.0, 0.0, 0.0}) == doctest::Approx(-1.0 / (4 * std::numbers::pi)));
  CHECK(Kernel(2).gamma({1.0, 0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(Kernel(2).gamma({0.0, std::exp(1.0), 0.0}) ==
        doctest::Approx(1.0 / (2 * std::numbers::pi)));
  CHECK_THROWS_AS(Kernel(3).gamma({0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(Kernel(2).gamma_hess({0.0, 0.0, 0.0}, 0, 1), DomainError);
  CHECK_THROWS_AS(Kernel(5), std::invalid_argument);
}

TEST_CASE("gamma Hessian matches central differences of gamma") {
  for (int n : {2, 3}) {
    const Kernel k(n);
    const Point z{0.3, -0.7, 0.4};
    const double e = 1e-4;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto shifted = [&](double si, double sj) {
          Point p = z;
          p[i] += si;
          p[j] += sj;
          return k.gamma(p);
        };
        const double fd =
            (shifted(e, e) - shifted(e, -e) - shifted(-e, e) + shifted(-e, -e)) / (4 * e * e);
        CHECK(k.gamma_hess(z, i, j) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("gamma is harmonic away from the origin") {
  for (int n : {2, 3}) {
    const Kernel k(n);
    const Point z{0.11, 0.52, -0.23};
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += k.gamma_hess(z, i, i);
    CHECK(std::abs(tr) < 1e-13);
  }
}

TEST_CASE("ball integral agrees with radial quadrature") {
  for (int n : {2, 3}) {
    const Kernel k(n);
    for (double rho : {0.01, 0.3, 1.0, 2.5}) {
      CHECK(k.ball_integral(rho) == doctest::Approx(radial_quadrature(k, rho)).epsilon(1e-8));
    }
  }
}

TEST_CASE("equivalent radius inverts the ball volume") {
  CHECK(Kernel(2).equivalent_radius(std::numbers::pi * 0.25) == doctest::Approx(0.5));
  CHECK(Kernel(3).equivalent_radius(4.0 * std::numbers::pi / 3.0 * 8.0) == doctest::Approx(2.0));
}

TEST_CASE("Hessian decay bound scales as |z|^-n") {
  for (int n : {2, 3}) {
    const Kernel k(n);
    const Point a{0.1, 0.2, 0.05};
    Point b = a;
    for (double& v : b) v *= 10.0;
    const Point sa[] = {a};
    const Point sb[] = {b};
    CHECK(k.hess_decay_bound(sa) == doctest::Approx(k.hess_decay_bound(sb)).epsilon(1e-12));
  }
}
