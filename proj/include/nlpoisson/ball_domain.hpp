#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace nlpoisson {

using Point = std::array<double, 3>;
using LatticeIndex = std::array<int, 3>;

/// Closed ball {|x| <= R} in R^n, n in {2, 3}.
class BallDomain {
 public:
  BallDomain(int dim, double radius);

  int dim() const noexcept { return dim_; }
  double radius() const noexcept { return radius_; }
  bool contains(const Point& x) const noexcept;

 private:
  int dim_;
  double radius_;
};

/// Volume of the unit ball in R^n.
double unit_ball_volume(int dim);

/// Quadrature point for a cell cut by the sphere, placed at the centroid of
/// cell ∩ D. Field values are taken from the owner node.
struct CutPoint {
  Point centroid{};
  double weight = 0.0;
  std::size_t owner = 0;
  bool own_cell = false;  // the cell is centred on its owner node
};

/// Cell-centred lattice covering the ball, origin-anchored.
///
/// Nodes are lattice points i*h (|i_k| <= m/2) lying in D, ordered
/// lexicographically in the lattice index. The weight of a node is the
/// measure of its cell intersected with D; cells that meet D but whose
/// centre lies outside give their (small) share to the nearest node in D.
class QuadGrid {
 public:
  const BallDomain& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim(); }
  double radius() const noexcept { return domain_.radius(); }
  int resolution() const noexcept { return resolution_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<LatticeIndex>& lattice() const noexcept { return lattice_; }
  /// Node weight for uncut cells, 0 for cells cut by the sphere.
  const std::vector<double>& bulk_weights() const noexcept { return bulk_weights_; }
  /// Centroid quadrature points of all cut cells; with bulk_weights they
  /// integrate the same measure as weights() but with exact first moments.
  const std::vector<CutPoint>& cut_points() const noexcept { return cut_points_; }
  /// True when the node is farther than 2h from the boundary sphere.
  bool interior(std::size_t node) const noexcept { return interior_[node] != 0; }
  std::size_t interior_count() const noexcept;

  /// Node id of the origin.
  std::size_t origin() const noexcept { return origin_; }
  /// Node id at a lattice index, or -1 when the point is not a node.
  long node_at(const LatticeIndex& idx) const noexcept;
  /// Linear code of a node's lattice index; code(a) - code(b) identifies the offset a - b.
  long offset_code(std::size_t node) const noexcept { return codes_[node]; }
  /// Stride used by offset codes (2m + 1).
  long code_stride() const noexcept { return 2L * resolution_ + 1; }

 private:
  friend QuadGrid build_grid(const BallDomain& domain, int resolution);
  explicit QuadGrid(const BallDomain& domain) : domain_(domain) {}

  BallDomain domain_;
  int resolution_ = 0;
  double spacing_ = 0.0;
  std::vector<Point> nodes_;
  std::vector<double> weights_;
  std::vector<double> bulk_weights_;
  std::vector<CutPoint> cut_points_;
  std::vector<LatticeIndex> lattice_;
  std::vector<std::uint8_t> interior_;
  std::vector<long> codes_;
  std::vector<long> lookup_;
  std::size_t origin_ = 0;
};

using GridPtr = std::shared_ptr<const QuadGrid>;

/// Builds the quadrature grid with h = 2R/m. Requires m even and m >= 8.
QuadGrid build_grid(const BallDomain& domain, int resolution);
GridPtr make_grid(const BallDomain& domain, int resolution);

struct CellCut {
  double fraction = 0.0;  // |cell ∩ D| / h^n
  Point centroid{};
};

/// Measure and centroid of cell ∩ D by recursive subdivision to a fixed depth.
CellCut cut_cell(const Point& center, double spacing, const BallDomain& domain, int depth = 4);

/// Fraction |cell ∩ D| / h^n.
double boundary_fraction(const Point& cell_center, double spacing, const BallDomain& domain,
                         int depth = 4);

}  // namespace nlpoisson
