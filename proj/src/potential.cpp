#include "nlpoisson/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace nlpoisson {

int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // rows 0..i-1 hold n, n-1, ... entries
  return i * n - i * (i - 1) / 2 + (j - i);
}

double PotentialField::hess_at(std::size_t node, int comp, int i, int j) const {
  if (!hess) throw std::logic_error("PotentialField: Hessian was not computed");
  const int n = base.grid().dim();
  return hess->at(node, comp * sym_pairs(n) + sym_index(n, i, j));
}

NewtonianOperator::NewtonianOperator(GridPtr grid)
    : grid_(std::move(grid)), kernel_(grid_->dim()) {
  const int n = grid_->dim();
  const long m = grid_->resolution();
  const long stride = grid_->code_stride();
  long size = 1;
  center_ = 0;
  for (int k = 0; k < n; ++k) {
    size *= stride;
    center_ = center_ * stride + m;
  }
  const double h = grid_->spacing();
  gamma_table_.assign(static_cast<std::size_t>(size), 0.0);
  hess_tables_.assign(static_cast<std::size_t>(sym_pairs(n)),
                      std::vector<double>(static_cast<std::size_t>(size), 0.0));
  for (long code = 0; code < size; ++code) {
    Point z{0.0, 0.0, 0.0};
    long rest = code;
    bool zero = true;
    for (int k = n - 1; k >= 0; --k) {
      const long d = rest % stride - m;
      rest /= stride;
      z[k] = static_cast<double>(d) * h;
      zero = zero && d == 0;
    }
    if (zero) continue;
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += z[k] * z[k];
    gamma_table_[static_cast<std::size_t>(code)] = kernel_.gamma_r2(r2);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        hess_tables_[static_cast<std::size_t>(sym_index(n, i, j))][static_cast<std::size_t>(code)] =
            kernel_.gamma_hess(z, i, j);
      }
    }
  }
}

void NewtonianOperator::hessian_row(const GridField& f, std::size_t target,
                                    std::span<double> out) const {
  const QuadGrid& grid = *grid_;
  const int n = grid.dim();
  const int pairs = sym_pairs(n);
  const int comps = f.components();
  const auto& w = grid.bulk_weights();
  const long base_code = grid.offset_code(target) + center_;
  const Point& x = grid.nodes()[target];
  std::vector<double> s0(static_cast<std::size_t>(pairs), 0.0);
  std::vector<double> s1(static_cast<std::size_t>(pairs * comps), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const std::size_t idx = static_cast<std::size_t>(base_code - grid.offset_code(j));
    for (int p = 0; p < pairs; ++p) {
      const double kw = hess_tables_[static_cast<std::size_t>(p)][idx] * w[j];
      s0[static_cast<std::size_t>(p)] += kw;
      for (int c = 0; c < comps; ++c) s1[static_cast<std::size_t>(p * comps + c)] += kw * f.at(j, c);
    }
  }
  for (const CutPoint& cp : grid.cut_points()) {
    if (cp.own_cell && cp.owner == target) continue;
    Point z{0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) z[k] = x[k] - cp.centroid[k];
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int p = sym_index(n, i, j);
        const double kw = kernel_.gamma_hess(z, i, j) * cp.weight;
        s0[static_cast<std::size_t>(p)] += kw;
        for (int c = 0; c < comps; ++c) s1[static_cast<std::size_t>(p * comps + c)] += kw * f.at(cp.owner, c);
      }
    }
  }
  for (int c = 0; c < comps; ++c) {
    const double fx = f.at(target, c);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int p = sym_index(n, i, j);
        double v = s1[static_cast<std::size_t>(p * comps + c)] - fx * s0[static_cast<std::size_t>(p)];
        if (i == j) v += fx / n;
        out[static_cast<std::size_t>(c * pairs + p)] = v;
      }
    }
  }
}

PotentialField NewtonianOperator::apply(const GridField& f, HessianMode mode) const {
  if (f.grid_ptr() != grid_) {
    throw std::invalid_argument("NewtonianOperator: field lives on a different grid");
  }
  const QuadGrid& grid = *grid_;
  const int n = grid.dim();
  const int comps = f.components();
  const std::size_t m = grid.size();
  const auto& w = grid.bulk_weights();
  const auto& cuts = grid.cut_points();
  // Own-cell weight for the singular term: full cell, or the cut fraction.
  std::vector<double> self_weight(grid.weights().size(), 0.0);
  for (std::size_t j = 0; j < m; ++j) self_weight[j] = w[j];
  for (const CutPoint& cp : cuts) {
    if (cp.own_cell) self_weight[cp.owner] = cp.weight;
  }

  std::vector<double> fw(m * static_cast<std::size_t>(comps));
  for (std::size_t j = 0; j < m; ++j) {
    for (int c = 0; c < comps; ++c) fw[j * comps + c] = f.at(j, c) * w[j];
  }

  PotentialField pot{GridField(grid_, comps, f.alpha()), std::nullopt, {}};
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(m); ++i) {
    const std::size_t ti = static_cast<std::size_t>(i);
    const long base_code = grid.offset_code(ti) + center_;
    const Point& x = grid.nodes()[ti];
    const double self = kernel_.ball_integral(kernel_.equivalent_radius(self_weight[ti]));
    for (int c = 0; c < comps; ++c) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        sum += gamma_table_[static_cast<std::size_t>(base_code - grid.offset_code(j))] * fw[j * comps + c];
      }
      for (const CutPoint& cp : cuts) {
        if (cp.own_cell && cp.owner == ti) continue;
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) r2 += (x[k] - cp.centroid[k]) * (x[k] - cp.centroid[k]);
        sum += kernel_.gamma_r2(r2) * cp.weight * f.at(cp.owner, c);
      }
      pot.base.at(ti, c) = sum + self * f.at(ti, c);
    }
  }
  if (mode == HessianMode::None) return pot;

  const int pairs = sym_pairs(n);
  std::vector<double> row(static_cast<std::size_t>(pairs * comps));
  hessian_row(f, grid.origin(), row);
  pot.origin_hessian.assign(static_cast<std::size_t>(comps), Matrix3{});
  for (int c = 0; c < comps; ++c) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        pot.origin_hessian[static_cast<std::size_t>(c)][i][j] =
            row[static_cast<std::size_t>(c * pairs + sym_index(n, i, j))];
      }
    }
  }
  if (mode == HessianMode::OriginOnly) return pot;

  GridField hess(grid_, comps * pairs, f.alpha());
#pragma omp parallel
  {
    std::vector<double> local(static_cast<std::size_t>(pairs * comps));
#pragma omp for schedule(dynamic, 8)
    for (long i = 0; i < static_cast<long>(m); ++i) {
      const std::size_t node = static_cast<std::size_t>(i);
      hessian_row(f, node, local);
      for (int q = 0; q < pairs * comps; ++q) hess.at(node, q) = local[static_cast<std::size_t>(q)];
    }
  }
  pot.hess = std::move(hess);
  return pot;
}

PotentialField newtonian(const GridField& f, HessianMode mode) {
  return NewtonianOperator(f.grid_ptr()).apply(f, mode);
}

double laplacian_identity_residual(const GridField& f, const PotentialField& pot) {
  const QuadGrid& grid = f.grid();
  const int n = grid.dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.interior(i)) continue;
    for (int c = 0; c < f.components(); ++c) {
      double tr = 0.0;
      for (int k = 0; k < n; ++k) tr += pot.hess_at(i, c, k, k);
      worst = std::max(worst, std::abs(tr - f.at(i, c)));
    }
  }
  return worst;
}

double fd_laplacian_residual(const GridField& f, const PotentialField& pot,
                             double radius_fraction) {
  const QuadGrid& grid = f.grid();
  const int n = grid.dim();
  const double limit = radius_fraction * grid.radius();
  std::vector<GridField> second;
  for (int k = 0; k < n; ++k) second.push_back(derivative(pot.base, pair_index(k, k)));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.interior(i)) continue;
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += grid.nodes()[i][k] * grid.nodes()[i][k];
    if (r2 > limit * limit) continue;
    for (int c = 0; c < f.components(); ++c) {
      double lap = 0.0;
      for (int k = 0; k < n; ++k) lap += second[static_cast<std::size_t>(k)].at(i, c);
      worst = std::max(worst, std::abs(lap - f.at(i, c)));
    }
  }
  return worst;
}

OperatorProbe operator_norm_probe(int trials, const GridPtr& grid, double alpha,
                                  std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("operator_norm_probe: need at least one trial");
  const NewtonianOperator op(grid);
  const int n = grid->dim();
  const double radius = grid->radius();
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  OperatorProbe probe;
  for (int t = 0; t < trials; ++t) {
    GridField f = GridField::scalar(grid, [](const Point&) { return 1.0; }, alpha);
    if (t > 0) {
      constexpr int kTerms = 3;
      double amp[kTerms], phase[kTerms], freq[kTerms][3];
      for (int s = 0; s < kTerms; ++s) {
        amp[s] = uniform(-1.0, 1.0);
        phase[s] = uniform(0.0, 2.0 * std::numbers::pi);
        for (int k = 0; k < 3; ++k) freq[s][k] = uniform(-3.0, 3.0);
      }
      const double shift = uniform(-1.0, 1.0);
      f = GridField::scalar(
          grid,
          [&](const Point& x) {
            double v = shift;
            for (int s = 0; s < kTerms; ++s) {
              double arg = phase[s];
              for (int k = 0; k < n; ++k) arg += freq[s][k] * x[k] / radius;
              v += amp[s] * std::cos(arg);
            }
            return v;
          },
          alpha);
    }
    const PotentialField pot = op.apply(f, HessianMode::Full);
    double nn2 = 0.0;
    const int pairs = sym_pairs(n);
    for (int p = 0; p < pairs; ++p) nn2 = std::max(nn2, hoelder_norm(pot.hess->component(p)));
    const double nf = hoelder_norm(f);
    probe.ratios.push_back(nn2 / nf);
    probe.c_hat = std::max(probe.c_hat, nn2 / nf);
  }
  return probe;
}

}  // namespace nlpoisson
