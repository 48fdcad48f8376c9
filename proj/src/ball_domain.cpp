#include "nlpoisson/ball_domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlpoisson {

BallDomain::BallDomain(int dim, double radius) : dim_(dim), radius_(radius) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("BallDomain: dimension must be 2 or 3, got " +
                                std::to_string(dim));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("BallDomain: radius must be positive and finite");
  }
}

bool BallDomain::contains(const Point& x) const noexcept {
  double r2 = 0.0;
  for (int k = 0; k < dim_; ++k) r2 += x[k] * x[k];
  return r2 <= radius_ * radius_;
}

double unit_ball_volume(int dim) {
  switch (dim) {
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw std::invalid_argument("unit_ball_volume: dimension must be 2 or 3");
  }
}

namespace {

// Accumulates the measure of cell ∩ D (in units of the cell) and its first moment.
void subdivide(const Point& c, double size, double radius, int dim, int depth, double scale,
               double& mass, Point& moment) {
  const double half = 0.5 * size;
  double near2 = 0.0;
  double far2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double a = std::abs(c[k]);
    far2 += (a + half) * (a + half);
    const double lo = std::max(0.0, a - half);
    near2 += lo * lo;
  }
  const double r2 = radius * radius;
  if (near2 >= r2) return;
  bool full = far2 <= r2;
  if (!full && depth == 0) {
    // Leaf straddling the sphere: treat the sphere as a plane across the leaf
    // and take the inside share as a linear ramp over the leaf's width along
    // the normal.
    double c2 = 0.0;
    double l1 = 0.0;
    for (int k = 0; k < dim; ++k) {
      c2 += c[k] * c[k];
      l1 += std::abs(c[k]);
    }
    const double cn = std::sqrt(c2);
    const double width = cn > 0.0 ? size * l1 / cn : size;
    const double inside = std::clamp(0.5 + (radius - cn) / width, 0.0, 1.0);
    mass += scale * inside;
    for (int k = 0; k < dim; ++k) moment[k] += scale * inside * c[k];
    return;
  }
  if (full) {
    mass += scale;
    for (int k = 0; k < dim; ++k) moment[k] += scale * c[k];
    return;
  }
  const double q = 0.25 * size;
  const int children = 1 << dim;
  for (int child = 0; child < children; ++child) {
    Point cc = c;
    for (int k = 0; k < dim; ++k) cc[k] += (child >> k & 1) ? q : -q;
    subdivide(cc, half, radius, dim, depth - 1, scale / children, mass, moment);
  }
}

}  // namespace

CellCut cut_cell(const Point& center, double spacing, const BallDomain& domain, int depth) {
  CellCut cut;
  Point moment{0.0, 0.0, 0.0};
  subdivide(center, spacing, domain.radius(), domain.dim(), depth, 1.0, cut.fraction, moment);
  cut.centroid = center;
  if (cut.fraction > 0.0) {
    for (int k = 0; k < domain.dim(); ++k) cut.centroid[k] = moment[k] / cut.fraction;
  }
  return cut;
}

double boundary_fraction(const Point& cell_center, double spacing, const BallDomain& domain,
                         int depth) {
  return cut_cell(cell_center, spacing, domain, depth).fraction;
}

std::size_t QuadGrid::interior_count() const noexcept {
  std::size_t count = 0;
  for (auto flag : interior_) count += flag;
  return count;
}

long QuadGrid::node_at(const LatticeIndex& idx) const noexcept {
  const int half = resolution_ / 2;
  const int side = resolution_ + 1;
  long linear = 0;
  for (int k = 0; k < dim(); ++k) {
    const int i = idx[k] + half;
    if (i < 0 || i >= side) return -1;
    linear = linear * side + i;
  }
  return lookup_[static_cast<std::size_t>(linear)];
}

QuadGrid build_grid(const BallDomain& domain, int resolution) {
  if (resolution < 8 || resolution % 2 != 0) {
    throw std::invalid_argument("build_grid: resolution must be even and >= 8, got " +
                                std::to_string(resolution));
  }
  QuadGrid grid(domain);
  const int n = domain.dim();
  const int half = resolution / 2;
  const int side = resolution + 1;
  const double h = 2.0 * domain.radius() / resolution;
  grid.resolution_ = resolution;
  grid.spacing_ = h;

  long total = 1;
  for (int k = 0; k < n; ++k) total *= side;
  grid.lookup_.assign(static_cast<std::size_t>(total), -1);

  // Lexicographic sweep over the lattice; first pass collects nodes in D.
  std::vector<LatticeIndex> outside_cells;
  std::vector<double> outside_fraction;
  std::vector<Point> outside_centroid;
  const double cell = std::pow(h, n);
  for (long linear = 0; linear < total; ++linear) {
    LatticeIndex idx{0, 0, 0};
    long rest = linear;
    for (int k = n - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rest % side) - half;
      rest /= side;
    }
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) x[k] = idx[k] * h;
    const CellCut cut = cut_cell(x, h, domain);
    const double frac = cut.fraction;
    if (frac <= 0.0) continue;
    if (domain.contains(x)) {
      const std::size_t id = grid.nodes_.size();
      grid.lookup_[static_cast<std::size_t>(linear)] = static_cast<long>(id);
      grid.nodes_.push_back(x);
      grid.lattice_.push_back(idx);
      grid.weights_.push_back(frac * cell);
      grid.bulk_weights_.push_back(frac < 1.0 ? 0.0 : cell);
      if (frac < 1.0) grid.cut_points_.push_back({cut.centroid, frac * cell, id, true});
    } else {
      outside_cells.push_back(idx);
      outside_fraction.push_back(frac);
      outside_centroid.push_back(cut.centroid);
    }
  }

  // Lump cut cells with exterior centres onto the nearest node in D.
  for (std::size_t c = 0; c < outside_cells.size(); ++c) {
    const LatticeIndex& idx = outside_cells[c];
    long best = -1;
    long best_d2 = std::numeric_limits<long>::max();
    const int span = 3;
    int offsets = 1;
    for (int k = 0; k < n; ++k) offsets *= 2 * span + 1;
    for (int o = 0; o < offsets; ++o) {
      LatticeIndex cand = idx;
      long d2 = 0;
      int rest = o;
      for (int k = 0; k < n; ++k) {
        const int off = rest % (2 * span + 1) - span;
        rest /= 2 * span + 1;
        cand[k] += off;
        d2 += static_cast<long>(off) * off;
      }
      const long id = grid.node_at(cand);
      if (id >= 0 && (d2 < best_d2 || (d2 == best_d2 && id < best))) {
        best = id;
        best_d2 = d2;
      }
    }
    if (best < 0) throw std::logic_error("build_grid: cut cell without a nearby node");
    grid.weights_[static_cast<std::size_t>(best)] += outside_fraction[c] * cell;
    grid.cut_points_.push_back(
        {outside_centroid[c], outside_fraction[c] * cell, static_cast<std::size_t>(best), false});
  }

  const long stride = 2L * resolution + 1;
  grid.interior_.resize(grid.nodes_.size());
  grid.codes_.resize(grid.nodes_.size());
  for (std::size_t i = 0; i < grid.nodes_.size(); ++i) {
    double r2 = 0.0;
    long code = 0;
    for (int k = 0; k < n; ++k) {
      r2 += grid.nodes_[i][k] * grid.nodes_[i][k];
      code = code * stride + grid.lattice_[i][k];
    }
    grid.interior_[i] = domain.radius() - std::sqrt(r2) > 2.0 * h ? 1 : 0;
    grid.codes_[i] = code;
  }
  grid.origin_ = static_cast<std::size_t>(grid.node_at({0, 0, 0}));
  return grid;
}

GridPtr make_grid(const BallDomain& domain, int resolution) {
  return std::make_shared<const QuadGrid>(build_grid(domain, resolution));
}

}  // namespace nlpoisson
