#include "nlpoisson/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace nlpoisson {

MultiIndex unit_index(int k) {
  MultiIndex beta{0, 0, 0};
  beta[k] = 1;
  return beta;
}

MultiIndex pair_index(int k, int l) {
  MultiIndex beta{0, 0, 0};
  beta[k] += 1;
  beta[l] += 1;
  return beta;
}

GridField::GridField(GridPtr grid, int components, double alpha)
    : grid_(std::move(grid)), components_(components), alpha_(alpha) {
  if (!grid_) throw std::invalid_argument("GridField: null grid");
  if (components < 1) throw std::invalid_argument("GridField: need at least one component");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("GridField: Hoelder exponent must lie in (0, 1)");
  }
  values_.assign(grid_->size() * static_cast<std::size_t>(components), 0.0);
}

GridField GridField::sample(GridPtr grid, int components,
                            const std::function<void(const Point&, std::span<double>)>& fn,
                            double alpha) {
  GridField f(std::move(grid), components, alpha);
  for (std::size_t i = 0; i < f.size(); ++i) {
    fn(f.grid().nodes()[i], std::span<double>(f.values_).subspan(i * components, components));
  }
  return f;
}

GridField GridField::scalar(GridPtr grid, const std::function<double(const Point&)>& fn,
                            double alpha) {
  return sample(
      std::move(grid), 1, [&](const Point& x, std::span<double> out) { out[0] = fn(x); }, alpha);
}

GridField GridField::component(int comp) const {
  GridField out(grid_, 1, alpha_);
  for (std::size_t i = 0; i < size(); ++i) out.values_[i] = at(i, comp);
  return out;
}

void GridField::set_component(int comp, const GridField& scalar) {
  if (!same_grid(scalar) || scalar.components() != 1) {
    throw std::invalid_argument("GridField::set_component: grid or width mismatch");
  }
  for (std::size_t i = 0; i < size(); ++i) at(i, comp) = scalar.values_[i];
}

namespace {

void require_compatible(const GridField& a, const GridField& b) {
  if (!a.same_grid(b) || a.components() != b.components()) {
    throw std::invalid_argument("GridField: grid or component mismatch");
  }
}

}  // namespace

GridField& GridField::operator+=(const GridField& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

GridField pointwise_product(const GridField& a, const GridField& b) {
  require_compatible(a, b);
  GridField out = a;
  auto dst = out.values();
  auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= src[i];
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

long neighbour(const QuadGrid& grid, std::size_t node, int axis, int step) {
  LatticeIndex idx = grid.lattice()[node];
  idx[axis] += step;
  return grid.node_at(idx);
}

// Returns NaN when no stencil of the requested order fits along the axis.
double axis_stencil(const GridField& f, int comp, std::size_t node, int axis, int deriv) {
  const QuadGrid& grid = f.grid();
  const double h = grid.spacing();
  const long p1 = neighbour(grid, node, axis, 1);
  const long m1 = neighbour(grid, node, axis, -1);
  const double f0 = f.at(node, comp);
  if (p1 >= 0 && m1 >= 0) {
    const double fp = f.at(static_cast<std::size_t>(p1), comp);
    const double fm = f.at(static_cast<std::size_t>(m1), comp);
    return deriv == 1 ? (fp - fm) / (2.0 * h) : (fp - 2.0 * f0 + fm) / (h * h);
  }
  const int dir = p1 >= 0 ? 1 : -1;
  const long n1 = dir > 0 ? p1 : m1;
  if (n1 < 0) return kMissing;
  const long n2 = neighbour(grid, node, axis, 2 * dir);
  if (n2 < 0) return kMissing;
  const double f1 = f.at(static_cast<std::size_t>(n1), comp);
  const double f2 = f.at(static_cast<std::size_t>(n2), comp);
  if (deriv == 1) return dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
  const long n3 = neighbour(grid, node, axis, 3 * dir);
  if (n3 < 0) return kMissing;
  const double f3 = f.at(static_cast<std::size_t>(n3), comp);
  return (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
}

std::vector<std::size_t> radial_order(const QuadGrid& grid) {
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<long> r2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    long s = 0;
    for (int k = 0; k < grid.dim(); ++k) s += static_cast<long>(grid.lattice()[i][k]) * grid.lattice()[i][k];
    r2[i] = s;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r2[a] < r2[b]; });
  return order;
}

// Quadratic extrapolation inward along the dominant lattice axis.
void fill_missing(GridField& out, const std::vector<std::size_t>& order) {
  const QuadGrid& grid = out.grid();
  for (std::size_t node : order) {
    for (int c = 0; c < out.components(); ++c) {
      if (!std::isnan(out.at(node, c))) continue;
      const LatticeIndex& idx = grid.lattice()[node];
      int axis = 0;
      for (int k = 1; k < grid.dim(); ++k) {
        if (std::abs(idx[k]) > std::abs(idx[axis])) axis = k;
      }
      const int step = idx[axis] > 0 ? -1 : 1;
      double v[3];
      int have = 0;
      for (int s = 1; s <= 3; ++s) {
        const long nb = neighbour(grid, node, axis, s * step);
        if (nb < 0 || std::isnan(out.at(static_cast<std::size_t>(nb), c))) break;
        v[have++] = out.at(static_cast<std::size_t>(nb), c);
      }
      if (have == 3) {
        out.at(node, c) = 3.0 * v[0] - 3.0 * v[1] + v[2];
      } else if (have == 2) {
        out.at(node, c) = 2.0 * v[0] - v[1];
      } else if (have == 1) {
        out.at(node, c) = v[0];
      } else {
        throw std::logic_error("derivative: node without inward neighbours");
      }
    }
  }
}

GridField axis_derivative(const GridField& f, int axis, int deriv) {
  GridField out(f.grid_ptr(), f.components(), f.alpha());
  bool missing = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int c = 0; c < f.components(); ++c) {
      const double v = axis_stencil(f, c, i, axis, deriv);
      missing = missing || std::isnan(v);
      out.at(i, c) = v;
    }
  }
  if (missing) fill_missing(out, radial_order(f.grid()));
  return out;
}

}  // namespace

GridField derivative(const GridField& field, const MultiIndex& beta) {
  const int n = field.grid().dim();
  const int total = order(beta);
  for (int k = n; k < 3; ++k) {
    if (beta[k] != 0) throw std::invalid_argument("derivative: multi-index exceeds dimension");
  }
  if (total == 0) return field;
  if (total > 2) throw std::invalid_argument("derivative: only |beta| <= 2 is supported");
  if (total == 1) {
    for (int k = 0; k < n; ++k) {
      if (beta[k] == 1) return axis_derivative(field, k, 1);
    }
  }
  for (int k = 0; k < n; ++k) {
    if (beta[k] == 2) return axis_derivative(field, k, 2);
  }
  int k = -1;
  int l = -1;
  for (int a = 0; a < n; ++a) {
    if (beta[a] == 1) (k < 0 ? k : l) = a;
  }
  GridField kl = axis_derivative(axis_derivative(field, k, 1), l, 1);
  GridField lk = axis_derivative(axis_derivative(field, l, 1), k, 1);
  kl += lk;
  kl *= 0.5;
  return kl;
}

double origin_derivative(const GridField& field, int comp, const MultiIndex& beta, int step) {
  const QuadGrid& grid = field.grid();
  const double hs = grid.spacing() * step;
  auto value = [&](LatticeIndex idx) {
    const long id = grid.node_at(idx);
    if (id < 0) throw std::invalid_argument("origin_derivative: stencil leaves the grid");
    return field.at(static_cast<std::size_t>(id), comp);
  };
  const int total = order(beta);
  if (total == 0) return field.at(grid.origin(), comp);
  int k = -1;
  int l = -1;
  for (int a = 0; a < grid.dim(); ++a) {
    for (int t = 0; t < beta[a]; ++t) (k < 0 ? k : l) = a;
  }
  LatticeIndex e{0, 0, 0};
  if (total == 1) {
    LatticeIndex p = e, m = e;
    p[k] = step;
    m[k] = -step;
    return (value(p) - value(m)) / (2.0 * hs);
  }
  if (total != 2) throw std::invalid_argument("origin_derivative: only |beta| <= 2");
  if (k == l) {
    LatticeIndex p = e, m = e;
    p[k] = step;
    m[k] = -step;
    return (value(p) - 2.0 * value(e) + value(m)) / (hs * hs);
  }
  LatticeIndex pp = e, pm = e, mp = e, mm = e;
  pp[k] = step, pp[l] = step;
  pm[k] = step, pm[l] = -step;
  mp[k] = -step, mp[l] = step;
  mm[k] = -step, mm[l] = -step;
  return (value(pp) - value(pm) - value(mp) + value(mm)) / (4.0 * hs * hs);
}

// ---------------------------------------------------------------------------
// Norms

double sup_norm(const GridField& field) {
  double m = 0.0;
  for (double v : field.values()) m = std::max(m, std::abs(v));
  return m;
}

namespace {

struct PairScanner {
  const GridField& f;
  int n;
  int comps;
  std::vector<double> inv_dist_alpha;  // indexed by squared lattice distance

  explicit PairScanner(const GridField& field)
      : f(field), n(field.grid().dim()), comps(field.components()) {
    const QuadGrid& grid = field.grid();
    const long m = grid.resolution();
    const std::size_t max_s = static_cast<std::size_t>(n * m * m) + 1;
    inv_dist_alpha.resize(max_s);
    const double h2 = grid.spacing() * grid.spacing();
    inv_dist_alpha[0] = 0.0;
    for (std::size_t s = 1; s < max_s; ++s) {
      inv_dist_alpha[s] = std::pow(static_cast<double>(s) * h2, -0.5 * field.alpha());
    }
  }

  double pair(std::size_t i, std::size_t j) const {
    const auto& li = f.grid().lattice()[i];
    const auto& lj = f.grid().lattice()[j];
    long s = 0;
    for (int k = 0; k < n; ++k) {
      const long d = li[k] - lj[k];
      s += d * d;
    }
    const double w = inv_dist_alpha[static_cast<std::size_t>(s)];
    double best = 0.0;
    for (int c = 0; c < comps; ++c) best = std::max(best, std::abs(f.at(i, c) - f.at(j, c)) * w);
    return best;
  }
};

}  // namespace

HoelderScan hoelder_scan(const GridField& field, const HoelderOptions& options) {
  const QuadGrid& grid = field.grid();
  const std::size_t m = grid.size();
  PairScanner scan(field);
  HoelderScan result;
  if (m <= options.exhaustive_limit) {
    double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
    for (long i = 0; i < static_cast<long>(m); ++i) {
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < m; ++j) {
        best = std::max(best, scan.pair(static_cast<std::size_t>(i), j));
      }
    }
    result.value = best;
    result.pairs = m * (m - 1) / 2;
    return result;
  }

  // Stratified subsample: one node per stratum, all pairs among them.
  const std::size_t s = options.subsample;
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> picked(s);
  for (std::size_t k = 0; k < s; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    picked[k] = std::min(m - 1, static_cast<std::size_t>((static_cast<double>(k) + u) *
                                                         static_cast<double>(m) / s));
  }
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (long a = 0; a < static_cast<long>(s); ++a) {
    for (std::size_t b = static_cast<std::size_t>(a) + 1; b < s; ++b) {
      best = std::max(best, scan.pair(picked[static_cast<std::size_t>(a)], picked[b]));
    }
  }
  std::uint64_t pairs = s * (s - 1) / 2;

  // All short-range pairs (lexicographically positive offsets only).
  const int n = grid.dim();
  const int r = options.short_range;
  std::vector<LatticeIndex> offsets;
  LatticeIndex off{0, 0, 0};
  const int span = 2 * r + 1;
  int count = 1;
  for (int k = 0; k < n; ++k) count *= span;
  for (int o = 0; o < count; ++o) {
    int rest = o;
    long d2 = 0;
    for (int k = 0; k < n; ++k) {
      off[k] = rest % span - r;
      rest /= span;
      d2 += static_cast<long>(off[k]) * off[k];
    }
    if (d2 == 0 || d2 > static_cast<long>(r) * r) continue;
    bool positive = false;
    for (int k = 0; k < n; ++k) {
      if (off[k] != 0) {
        positive = off[k] > 0;
        break;
      }
    }
    if (positive) offsets.push_back(off);
  }
  std::uint64_t short_pairs = 0;
#pragma omp parallel for schedule(static) reduction(max : best) reduction(+ : short_pairs)
  for (long i = 0; i < static_cast<long>(m); ++i) {
    const LatticeIndex& li = grid.lattice()[static_cast<std::size_t>(i)];
    for (const auto& o : offsets) {
      LatticeIndex lj = li;
      for (int k = 0; k < n; ++k) lj[k] += o[k];
      const long j = grid.node_at(lj);
      if (j < 0) continue;
      best = std::max(best, scan.pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
      ++short_pairs;
    }
  }
  result.value = best;
  result.pairs = pairs + short_pairs;
  return result;
}

double hoelder_const(const GridField& field, const HoelderOptions& options) {
  return hoelder_scan(field, options).value;
}

double hoelder_norm(const GridField& field, const HoelderOptions& options) {
  const double two_r = 2.0 * field.grid().radius();
  return sup_norm(field) + std::pow(two_r, field.alpha()) * hoelder_const(field, options);
}

double norm_k(const GridField& field, int k, const HoelderOptions& options) {
  const int n = field.grid().dim();
  if (k == 0) return hoelder_norm(field, options);
  double best = 0.0;
  if (k == 1) {
    for (int a = 0; a < n; ++a) {
      best = std::max(best, hoelder_norm(derivative(field, unit_index(a)), options));
    }
    return best;
  }
  if (k != 2) throw std::invalid_argument("norm_k: only k <= 2 is supported");
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      best = std::max(best, hoelder_norm(derivative(field, pair_index(a, b)), options));
    }
  }
  return best;
}

HoelderReport norm2(const GridField& field, const HoelderOptions& options) {
  HoelderReport report;
  const int n = field.grid().dim();
  const double scale = std::pow(2.0 * field.grid().radius(), field.alpha());
  auto measure = [&](const MultiIndex& beta, const GridField& g) {
    const double sup = sup_norm(g);
    const HoelderScan scan = hoelder_scan(g, options);
    report.pairs_examined += scan.pairs;
    const double nrm = sup + scale * scan.value;
    report.derivative_norms.push_back({beta, nrm});
    return std::pair{sup, scan.value};
  };
  const auto [sup, hc] = measure({0, 0, 0}, field);
  report.sup_norm = sup;
  report.hoelder_const = hc;
  report.norm = sup + scale * hc;
  for (int a = 0; a < n; ++a) {
    measure(unit_index(a), derivative(field, unit_index(a)));
    report.norm1 = std::max(report.norm1, report.derivative_norms.back().norm);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      measure(pair_index(a, b), derivative(field, pair_index(a, b)));
      report.norm2 = std::max(report.norm2, report.derivative_norms.back().norm);
    }
  }
  return report;
}

GridField vanishing_order_project(const GridField& field) {
  GridField out = field;
  const QuadGrid& grid = field.grid();
  const int n = grid.dim();
  for (int c = 0; c < field.components(); ++c) {
    const double v0 = field.at(grid.origin(), c);
    double g[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) g[k] = origin_derivative(field, c, unit_index(k));
    for (std::size_t i = 0; i < out.size(); ++i) {
      double lin = v0;
      for (int k = 0; k < n; ++k) lin += g[k] * grid.nodes()[i][k];
      out.at(i, c) -= lin;
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const GridField& field) {
  const QuadGrid& grid = field.grid();
  const int n = grid.dim();
  for (int k = 0; k < n; ++k) out << (k ? "," : "") << 'x' << k + 1;
  for (int c = 0; c < field.components(); ++c) out << ",u" << c + 1;
  out << '\n';
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (int k = 0; k < n; ++k) out << (k ? "," : "") << format_double(grid.nodes()[i][k]);
    for (int c = 0; c < field.components(); ++c) out << ',' << format_double(field.at(i, c));
    out << '\n';
  }
}

}  // namespace nlpoisson
