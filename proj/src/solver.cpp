#include "nlpoisson/solver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nlpoisson/errors.hpp"

namespace nlpoisson {

double HarmonicSeed::norm2() const {
  double m = 0.0;
  for (const auto& A : a) {
    for (int k = 0; k < dim; ++k) {
      for (int l = 0; l < dim; ++l) m = std::max(m, std::abs(A[k][l]));
    }
  }
  return 2.0 * m;
}

bool HarmonicSeed::has_affine() const {
  auto nonzero = [](double v) { return v != 0.0; };
  return std::any_of(c0.begin(), c0.end(), nonzero) || std::any_of(c1.begin(), c1.end(), nonzero);
}

HarmonicSeed make_seed(Mode mode, double gamma0, int dim, int components, std::vector<Matrix3> a,
                       std::vector<double> c0, std::vector<double> c1) {
  if (static_cast<int>(a.size()) != components) {
    throw std::invalid_argument("make_seed: need one coefficient matrix per component");
  }
  HarmonicSeed s;
  s.dim = dim;
  s.components = components;
  s.a = std::move(a);
  s.c0 = c0.empty() ? std::vector<double>(static_cast<std::size_t>(components), 0.0) : std::move(c0);
  s.c1 = c1.empty() ? std::vector<double>(static_cast<std::size_t>(components * dim), 0.0) : std::move(c1);
  if (static_cast<int>(s.c0.size()) != components || static_cast<int>(s.c1.size()) != components * dim) {
    throw std::invalid_argument("make_seed: c0 needs N entries and c1 needs N*n entries");
  }
  for (int c = 0; c < components; ++c) {
    const Matrix3& A = s.a[static_cast<std::size_t>(c)];
    double trace = 0.0;
    for (int k = 0; k < dim; ++k) {
      trace += A[k][k];
      for (int l = 0; l < dim; ++l) {
        if (A[k][l] != A[l][k]) {
          throw std::invalid_argument("make_seed: coefficients of component " + std::to_string(c + 1) +
                                      " are not symmetric");
        }
      }
    }
    if (std::abs(trace) > 1e-12) {
      throw std::invalid_argument("make_seed: component " + std::to_string(c + 1) + " has trace " +
                                  format_double(trace) + ", the seed would not be harmonic");
    }
  }
  if (s.norm2() > gamma0 / 2.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("make_seed: seed norm 2 max|a_kl| = " + format_double(s.norm2()) +
                                " exceeds gamma0 / 2 = " + format_double(gamma0 / 2.0));
  }
  if (mode != Mode::Thm12 && s.has_affine()) {
    throw std::invalid_argument("make_seed: c0 and c1 are only allowed in thm12 mode");
  }
  return s;
}

std::vector<Matrix3> default_seed_coefficients(int dim, int components, double gamma0) {
  if (dim < 2) throw std::invalid_argument("default seed needs at least two dimensions");
  Matrix3 A{};
  A[0][1] = A[1][0] = gamma0 / 8.0;
  return std::vector<Matrix3>(static_cast<std::size_t>(components), A);
}

std::vector<Matrix3> random_seed_coefficients(int dim, int components, double gamma0,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&] {
    return gamma0 / 8.0 * (2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0);
  };
  std::vector<Matrix3> out;
  for (int c = 0; c < components; ++c) {
    Matrix3 A{};
    double trace = 0.0;
    for (int k = 0; k < dim; ++k) {
      A[k][k] = uniform();
      trace += A[k][k];
      for (int l = k + 1; l < dim; ++l) A[k][l] = A[l][k] = uniform();
    }
    for (int k = 0; k < dim; ++k) A[k][k] -= trace / dim;
    out.push_back(A);
  }
  return out;
}

GridField seed_field(const HarmonicSeed& seed, const GridPtr& grid, bool with_affine, double alpha) {
  const int n = seed.dim;
  return GridField::sample(
      grid, seed.components,
      [&](const Point& x, std::span<double> out) {
        for (int c = 0; c < seed.components; ++c) {
          const Matrix3& A = seed.a[static_cast<std::size_t>(c)];
          double v = 0.0;
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) v += A[k][l] * x[k] * x[l];
          }
          if (with_affine) {
            v += seed.c0[static_cast<std::size_t>(c)];
            for (int k = 0; k < n; ++k) v += seed.c1[static_cast<std::size_t>(c * n + k)] * x[k];
          }
          out[static_cast<std::size_t>(c)] = v;
        }
      },
      alpha);
}

ThetaResult theta(const GridField& u, const NonlinearitySpec& spec, const NewtonianOperator& op) {
  const GridField f = eval_on_field(spec, u);
  PotentialField pot = op.apply(f, HessianMode::OriginOnly);
  const QuadGrid& grid = u.grid();
  const int n = grid.dim();
  const int N = spec.components;
  GridField th = pot.base;
  for (int c = 0; c < N; ++c) {
    const double w0 = pot.base.at(grid.origin(), c);
    double g[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) g[k] = origin_derivative(pot.base, c, unit_index(k));
    const Matrix3& H = pot.origin_hessian[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point& x = grid.nodes()[i];
      double p = w0;
      for (int k = 0; k < n; ++k) {
        p += g[k] * x[k];
        for (int l = k + 1; l < n; ++l) p += H[k][l] * x[k] * x[l];
      }
      th.at(i, c) -= p;
    }
  }
  return {std::move(th), std::move(pot.base), std::move(pot.origin_hessian)};
}

double stencil_truncation(const GridField& f, int comp, const MultiIndex& beta) {
  const double h = f.grid().spacing();
  const double d1 = origin_derivative(f, comp, beta, 1);
  const double d2 = origin_derivative(f, comp, beta, 2);
  // Rounding in the stencil itself sets a floor on what is resolvable.
  double scale = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) scale = std::max(scale, std::abs(f.at(i, comp)));
  const double floor = 16.0 * DBL_EPSILON * scale / std::pow(h, order(beta));
  return std::max(std::abs(d1 - d2), floor);
}

bool AnchorCheck::within(double factor) const {
  return value_ratio <= factor && gradient_ratio <= factor && off_diagonal_ratio <= factor;
}

AnchorCheck check_anchoring(const ThetaResult& t) {
  AnchorCheck a;
  const int n = t.theta.grid().dim();
  const std::size_t origin = t.theta.grid().origin();
  auto ratio = [](double value, double estimate) {
    return value == 0.0 ? 0.0 : estimate > 0.0 ? value / estimate : INFINITY;
  };
  for (int c = 0; c < t.theta.components(); ++c) {
    // The value is read off the node itself, so its only error is rounding.
    const double v = std::abs(t.theta.at(origin, c));
    a.value = std::max(a.value, v);
    a.value_ratio = std::max(a.value_ratio, ratio(v, DBL_EPSILON * std::abs(t.omega.at(origin, c))));
    for (int k = 0; k < n; ++k) {
      const double g = std::abs(origin_derivative(t.theta, c, unit_index(k)));
      a.gradient = std::max(a.gradient, g);
      a.gradient_ratio = std::max(a.gradient_ratio, ratio(g, stencil_truncation(t.omega, c, unit_index(k))));
      for (int l = k + 1; l < n; ++l) {
        const double o = std::abs(origin_derivative(t.theta, c, pair_index(k, l)));
        a.off_diagonal = std::max(a.off_diagonal, o);
        a.off_diagonal_ratio =
            std::max(a.off_diagonal_ratio, ratio(o, stencil_truncation(t.omega, c, pair_index(k, l))));
      }
    }
  }
  return a;
}

std::string to_string(Radiality r) {
  return r == Radiality::NonRadial ? "non_radial" : "possibly_radial";
}

RadialityVerdict radiality_check(const std::vector<Matrix3>& hessians, int dim, double tol) {
  RadialityVerdict v;
  for (std::size_t c = 0; c < hessians.size(); ++c) {
    const Matrix3& H = hessians[c];
    double trace = 0.0;
    for (int k = 0; k < dim; ++k) trace += H[k][k];
    double dev = 0.0;
    for (int k = 0; k < dim; ++k) {
      for (int l = 0; l < dim; ++l) dev = std::max(dev, std::abs(H[k][l] - (k == l ? trace / dim : 0.0)));
    }
    v.deviation = std::max(v.deviation, dev);
    if (dev > tol && v.component < 0) {
      v.component = static_cast<int>(c);
      v.verdict = Radiality::NonRadial;
      std::ostringstream w;
      w << "component " << c + 1 << ": |H - (tr H / n) I|_max = " << format_double(dev) << " > "
        << format_double(tol) << ", H is not a multiple of the identity";
      v.witness = w.str();
    }
  }
  if (v.verdict == Radiality::PossiblyRadial) {
    v.witness = "every Hessian at the origin is within " + format_double(tol) + " of (tr H / n) I";
  }
  return v;
}

double pde_residual(const NonlinearitySpec& spec, const GridField& u) {
  const QuadGrid& grid = u.grid();
  const int n = grid.dim();
  const GridField a = eval_on_field(spec, u);
  GridField lap(u.grid_ptr(), u.components(), u.alpha());
  for (int k = 0; k < n; ++k) lap += derivative(u, pair_index(k, k));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.interior(i)) continue;
    for (int c = 0; c < u.components(); ++c) worst = std::max(worst, std::abs(lap.at(i, c) - a.at(i, c)));
  }
  return worst;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

SolveReport solve(const NonlinearitySpec& spec, Mode mode, const HarmonicSeed& seed,
                  const ContractionCertificate& certificate, const SolveOptions& options) {
  if (!certificate.admissible && !options.force) {
    throw RefusedError("certificate is not admissible (binding constraint: " + certificate.binding + ")");
  }
  if (seed.dim != spec.dim || seed.components != spec.components) {
    throw std::invalid_argument("solve: seed shape does not match the system");
  }
  const NonlinearitySpec work = mode == Mode::Thm12 && seed.has_affine() ? shift_spec(spec, seed.c0, seed.c1) : spec;
  if (!certificate.spec_text.empty() && certificate.spec_text != print_spec(work)) {
    throw std::invalid_argument("solve: the certificate was issued for a different system or initial values");
  }

  SolveReport rep;
  rep.certificate = certificate;
  rep.R = certificate.box.R;
  rep.gamma0 = certificate.box.gamma;
  const GridPtr grid = make_grid(BallDomain(spec.dim, rep.R), options.resolution);
  const NewtonianOperator op(grid);
  const int n = spec.dim;
  const int N = spec.components;
  const double tol = options.tol > 0 ? options.tol : 1e-8 * rep.gamma0;

  const GridField h = seed_field(seed, grid, false, options.alpha);
  GridField u = h;
  std::vector<Matrix3> omega_hessian(static_cast<std::size_t>(N), Matrix3{});
  int doublings = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    ThetaResult t = theta(u, work, op);
    GridField next = h + t.theta;
    const double d = norm_k(next - u, 2);
    rep.history.push_back(d);
    rep.iterations = it;
    const std::size_t m = rep.history.size();
    const double ratio = m >= 2 && rep.history[m - 2] > 0 ? d / rep.history[m - 2] : 0.0;
    if (m >= 2) rep.ratios.push_back(ratio);
    u = std::move(next);
    omega_hessian = std::move(t.omega_hessian);
    if (!std::isfinite(d)) throw DivergenceError("Picard iteration produced a non-finite update", rep.history);
    doublings = ratio >= 2.0 ? doublings + 1 : 0;
    if (doublings >= 5) {
      throw DivergenceError("Picard iteration diverged: update norm doubled five times in a row", rep.history);
    }
    if (d == 0.0 || (d <= tol && it >= options.min_iter)) {
      rep.converged = true;
      break;
    }
  }
  std::vector<double> defined;
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
    if (rep.history[i] > 0) defined.push_back(rep.ratios[i]);
  }
  rep.rho_hat = median(defined);

  GridField full = u;
  if (mode == Mode::Thm12 && seed.has_affine()) {
    HarmonicSeed affine = seed;
    for (auto& A : affine.a) A = Matrix3{};
    full += seed_field(affine, grid, true, options.alpha);
  }
  rep.final_residual = pde_residual(spec, full);
  for (int c = 0; c < N; ++c) {
    Matrix3 H{};
    Matrix3 S{};
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        H[k][l] = 2.0 * seed.a[static_cast<std::size_t>(c)][k][l];
        if (k == l) H[k][l] += omega_hessian[static_cast<std::size_t>(c)][k][k];
        S[k][l] = origin_derivative(full, c, pair_index(k, l));
        rep.stencil_tol = std::max(rep.stencil_tol, stencil_truncation(full, c, pair_index(k, l)));
      }
      rep.gradient_at_origin.push_back(origin_derivative(full, c, unit_index(k)));
    }
    rep.hessian_at_origin.push_back(H);
    rep.hessian_stencil.push_back(S);
    rep.value_at_origin.push_back(full.at(grid->origin(), c));
  }
  rep.radiality = radiality_check(rep.hessian_at_origin, n, 10.0 * rep.stencil_tol);
  rep.solution = std::move(full);
  return rep;
}

EllipticTransform elliptic_transform(const Matrix3& A0, int dim) {
  double scale = 0.0;
  for (int k = 0; k < dim; ++k) {
    for (int l = 0; l < dim; ++l) scale = std::max(scale, std::abs(A0[k][l]));
  }
  for (int k = 0; k < dim; ++k) {
    for (int l = 0; l < k; ++l) {
      if (std::abs(A0[k][l] - A0[l][k]) > 1e-12 * scale) {
        throw std::invalid_argument("elliptic_transform: coefficient matrix is not symmetric");
      }
    }
  }
  Matrix3 L{};
  for (int j = 0; j < dim; ++j) {
    double d = A0[j][j];
    for (int k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
    if (!(d > 0.0)) throw std::invalid_argument("elliptic_transform: coefficient matrix is not positive definite");
    L[j][j] = std::sqrt(d);
    for (int i = j + 1; i < dim; ++i) {
      double s = A0[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = s / L[j][j];
    }
  }
  // Linv by forward substitution; P = Linv^T, P_inv = L^T.
  Matrix3 Linv{};
  for (int col = 0; col < dim; ++col) {
    for (int i = 0; i < dim; ++i) {
      double s = i == col ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= L[i][k] * Linv[k][col];
      Linv[i][col] = s / L[i][i];
    }
  }
  EllipticTransform t;
  t.dim = dim;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      t.P[i][j] = Linv[j][i];
      t.P_inv[i][j] = L[j][i];
    }
  }
  return t;
}

}  // namespace nlpoisson
