#include "nlpoisson/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlpoisson/errors.hpp"

namespace nlpoisson {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

double norm2(const Point& z, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += z[k] * z[k];
  return s;
}

}  // namespace

Kernel::Kernel(int dim) : dim_(dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("Kernel: dimension must be 2 or 3");
}

double Kernel::gamma_r2(double r2) const noexcept {
  if (dim_ == 2) return 0.5 * std::log(r2) / kTwoPi;
  return -1.0 / (kFourPi * std::sqrt(r2));
}

double Kernel::gamma(const Point& z) const {
  const double r2 = norm2(z, dim_);
  if (r2 == 0.0) throw DomainError("Kernel::gamma: evaluated at the singular point z = 0");
  return gamma_r2(r2);
}

double Kernel::gamma_hess(const Point& z, int i, int j) const {
  const double r2 = norm2(z, dim_);
  if (r2 == 0.0) throw DomainError("Kernel::gamma_hess: evaluated at the singular point z = 0");
  const double delta = i == j ? 1.0 : 0.0;
  if (dim_ == 2) return (delta / r2 - 2.0 * z[i] * z[j] / (r2 * r2)) / kTwoPi;
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  return (delta / r3 - 3.0 * z[i] * z[j] / (r3 * r2)) / kFourPi;
}

double Kernel::ball_integral(double rho) const noexcept {
  // n = 2: int_0^rho (1/2pi) ln r 2pi r dr;  n = 3: int_0^rho -1/(4pi r) 4pi r^2 dr.
  if (dim_ == 2) return 0.5 * rho * rho * (std::log(rho) - 0.5);
  return -0.5 * rho * rho;
}

double Kernel::equivalent_radius(double volume) const noexcept {
  if (dim_ == 2) return std::sqrt(volume / std::numbers::pi);
  return std::cbrt(volume / (kFourPi / 3.0));
}

double Kernel::hess_decay_bound(std::span<const Point> samples) const {
  double best = 0.0;
  for (const Point& z : samples) {
    const double r = std::sqrt(norm2(z, dim_));
    const double rn = std::pow(r, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) best = std::max(best, std::abs(gamma_hess(z, i, j)) * rn);
    }
  }
  return best;
}

}  // namespace nlpoisson
