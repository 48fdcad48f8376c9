#pragma once

#include <span>

#include "nlpoisson/ball_domain.hpp"

namespace nlpoisson {

/// Fundamental solution of the Laplacian in R^n, n in {2, 3}:
///   n = 2: (1/2pi) ln|z|,   n = 3: 1/(n(2-n)w_n) |z|^(2-n) = -1/(4pi|z|).
/// With this sign, Delta Gamma = delta_0.
class Kernel {
 public:
  explicit Kernel(int dim);

  int dim() const noexcept { return dim_; }

  double gamma(const Point& z) const;
  /// d_i d_j Gamma(z), axes zero-based.
  double gamma_hess(const Point& z, int i, int j) const;

  /// Gamma as a function of |z|^2 (no singularity check).
  double gamma_r2(double r2) const noexcept;
  /// Integral of Gamma over the ball of radius rho centred at the singularity.
  double ball_integral(double rho) const noexcept;
  /// Radius of the ball with the given volume.
  double equivalent_radius(double volume) const noexcept;

  /// max over samples and (i, j) of |d_ij Gamma(z)| |z|^n.
  double hess_decay_bound(std::span<const Point> samples) const;

 private:
  int dim_;
};

}  // namespace nlpoisson
