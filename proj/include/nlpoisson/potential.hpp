#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "nlpoisson/field.hpp"
#include "nlpoisson/kernels.hpp"

namespace nlpoisson {

using Matrix3 = std::array<std::array<double, 3>, 3>;

enum class HessianMode { None, OriginOnly, Full };

/// Number of independent entries of a symmetric n x n matrix.
inline int sym_pairs(int n) { return n * (n + 1) / 2; }
/// Position of (i, j) in the packed upper triangle (i, j zero-based, any order).
int sym_index(int n, int i, int j);

/// Newtonian potential N(f) and its second derivatives.
struct PotentialField {
  GridField base;
  /// Packed Hessian, component c * sym_pairs(n) + sym_index(i, j), from the
  /// subtraction formula at every node. The formula is exact for constants on
  /// the whole open ball, and near the sphere it is markedly more accurate than
  /// second differences of `base`.
  std::optional<GridField> hess;
  /// Hessian at the origin node from the subtraction formula, per component.
  std::vector<Matrix3> origin_hessian;

  double hess_at(std::size_t node, int comp, int i, int j) const;
};

/// Direct all-pairs summation of N(f)(x_i) = sum_j Gamma(x_i - y_j) f(y_j) w_j.
///
/// The singular cell uses the analytic integral of Gamma over the ball of
/// equal volume. Second derivatives come from
///   d_ij N(f)(x) = sum_{y != x} d_ij Gamma(x - y)(f(y) - f(x)) w + delta_ij f(x)/n,
/// the sign of the local term matching Delta Gamma = delta_0 so that
/// Delta N(f) = f. Kernel values are tabulated per lattice offset.
class NewtonianOperator {
 public:
  explicit NewtonianOperator(GridPtr grid);

  const GridPtr& grid() const noexcept { return grid_; }
  PotentialField apply(const GridField& f, HessianMode mode = HessianMode::Full) const;

 private:
  void hessian_row(const GridField& f, std::size_t target, std::span<double> out) const;

  GridPtr grid_;
  Kernel kernel_;
  long center_ = 0;
  std::vector<double> gamma_table_;
  std::vector<std::vector<double>> hess_tables_;  // per packed (i, j)
};

PotentialField newtonian(const GridField& f, HessianMode mode = HessianMode::Full);

/// max over interior nodes of |sum_i d_ii N(f) - f| using the stored Hessian.
/// The kernel sum is traceless away from the singularity, so this is a
/// round-off level check on the local term.
double laplacian_identity_residual(const GridField& f, const PotentialField& pot);

/// Independent route: central-difference Laplacian of the potential values,
/// max over interior nodes with |x| <= radius_fraction * R. Nodes a few h from
/// the sphere carry an O(1) artefact from the point quadrature of cut cells,
/// so convergence is only seen at a fixed distance from the boundary.
double fd_laplacian_residual(const GridField& f, const PotentialField& pot,
                             double radius_fraction = 0.5);

struct OperatorProbe {
  double c_hat = 0.0;
  std::vector<double> ratios;  // ||N(f)||^(2) / ||f|| per trial, trial 0 is f = 1
};

/// Empirical C(n, alpha) = max ||N(f)||^(2) / ||f|| over f = 1 and random
/// trigonometric polynomials scaled to the ball.
OperatorProbe operator_norm_probe(int trials, const GridPtr& grid, double alpha = 0.5,
                                  std::uint64_t seed = 0x5EED);

}  // namespace nlpoisson
