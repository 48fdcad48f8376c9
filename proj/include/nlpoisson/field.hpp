#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nlpoisson/ball_domain.hpp"

namespace nlpoisson {

/// Multi-index beta = (beta_1, ..., beta_n) of a partial derivative.
using MultiIndex = std::array<int, 3>;

inline int order(const MultiIndex& beta) { return beta[0] + beta[1] + beta[2]; }
MultiIndex unit_index(int k);
MultiIndex pair_index(int k, int l);

/// A vector function sampled at every grid node, values stored node-major.
class GridField {
 public:
  GridField(GridPtr grid, int components, double alpha = 0.5);

  static GridField sample(GridPtr grid, int components,
                          const std::function<void(const Point&, std::span<double>)>& fn,
                          double alpha = 0.5);
  static GridField scalar(GridPtr grid, const std::function<double(const Point&)>& fn,
                          double alpha = 0.5);

  const QuadGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return grid_->size(); }

  double& at(std::size_t node, int comp) { return values_[node * components_ + comp]; }
  double at(std::size_t node, int comp) const { return values_[node * components_ + comp]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// One component as a scalar field.
  GridField component(int comp) const;
  void set_component(int comp, const GridField& scalar);
  bool same_grid(const GridField& other) const noexcept { return grid_ == other.grid_; }

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

 private:
  GridPtr grid_;
  int components_;
  double alpha_;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);
/// Pointwise product of two scalar (or equal-width) fields.
GridField pointwise_product(const GridField& a, const GridField& b);

/// Finite-difference partial derivative for |beta| <= 2.
///
/// Central differences where both neighbours exist, second-order one-sided
/// stencils otherwise; mixed partials are symmetrised nested first
/// differences. Nodes with no stencil along an axis (near the sphere where
/// x_k = 0) are filled by quadratic extrapolation inward along the dominant
/// coordinate axis.
GridField derivative(const GridField& field, const MultiIndex& beta);

/// Central-difference partials at the origin node, no extrapolation.
double origin_derivative(const GridField& field, int comp, const MultiIndex& beta, int step = 1);

double sup_norm(const GridField& field);

struct HoelderScan {
  double value = 0.0;
  std::uint64_t pairs = 0;
};

struct HoelderOptions {
  std::size_t exhaustive_limit = 4096;
  std::size_t subsample = 4096;
  int short_range = 4;  // in units of h
  std::uint64_t seed = 0x5EED;
};

/// Discrete H_alpha: max over node pairs of |f(x) - f(x')| / |x - x'|^alpha,
/// max over components. A lower bound for the continuum supremum.
HoelderScan hoelder_scan(const GridField& field, const HoelderOptions& options = {});
double hoelder_const(const GridField& field, const HoelderOptions& options = {});

/// ||f|| = |f| + (2R)^alpha H_alpha[f].
double hoelder_norm(const GridField& field, const HoelderOptions& options = {});

/// ||f||^(k) = max over |beta| = k of ||d^beta f||, max over components (k <= 2).
double norm_k(const GridField& field, int k, const HoelderOptions& options = {});

struct DerivativeNorm {
  MultiIndex beta{};
  double norm = 0.0;
};

struct HoelderReport {
  double sup_norm = 0.0;
  double hoelder_const = 0.0;
  double norm = 0.0;
  std::vector<DerivativeNorm> derivative_norms;  // every |beta| <= 2
  double norm1 = 0.0;
  double norm2 = 0.0;
  std::uint64_t pairs_examined = 0;
};

HoelderReport norm2(const GridField& field, const HoelderOptions& options = {});

/// Subtracts f(0) + grad f(0) . x (central stencils at the origin).
GridField vanishing_order_project(const GridField& field);

/// Header x1..xn,u1..uN then one row per node, 17 significant digits.
void write_csv(std::ostream& out, const GridField& field);
std::string format_double(double v);

}  // namespace nlpoisson
