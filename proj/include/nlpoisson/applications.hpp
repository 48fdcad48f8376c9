#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlpoisson/certificate.hpp"
#include "nlpoisson/nonlinearity.hpp"
#include "nlpoisson/potential.hpp"

namespace nlpoisson {

/// Riemannian metric g_ij(x) on a neighbourhood of 0 in R^dim. Entries are
/// trees in the x variables only (ids 0..dim-1), stored row-major with
/// g[i * dim + j] == g[j * dim + i].
struct MetricSpec {
  int dim = 2;
  std::vector<expr::Expr> g;
  std::string name;

  const expr::Expr& at(int i, int j) const { return g[static_cast<std::size_t>(i * dim + j)]; }
  /// g(x) evaluated numerically.
  Matrix3 eval(const Point& x) const;
  bool is_euclidean() const;
};

MetricSpec euclidean_metric(int dim);

/// `gij = expr` lines (1 <= i, j <= dim). An off-diagonal entry given once is
/// mirrored; given twice, both must print identically. Missing diagonal
/// entries default to 1 and missing off-diagonal entries to 0. g(0) must be
/// positive definite.
MetricSpec parse_metric(std::string_view source, int dim, std::string name = "custom");

/// Gamma[i][j][k] = 1/2 g^il (d_k g_lj + d_j g_lk - d_l g_jk), with g^-1 from
/// the adjugate. The (j, k) and (k, j) entries share one tree. With
/// check_origin, det g(0) <= 0 is an error; coordinate singularities at 0
/// (polar-type metrics) need it off.
using Christoffel = std::vector<std::vector<std::vector<expr::Expr>>>;
Christoffel christoffel(const MetricSpec& metric, bool check_origin = true);

/// Symbolic inverse metric g^ij and sqrt(det g).
std::vector<expr::Expr> inverse_metric(const MetricSpec& metric);
expr::Expr sqrt_det(const MetricSpec& metric);

/// A ready-to-run problem: the system, the mode it is certified in, its
/// initial values and the sweep defaults a run should start from.
struct ProblemPreset {
  std::string name;
  std::string description;
  NonlinearitySpec spec;
  Mode mode = Mode::Thm13;
  std::vector<double> c0;  // thm12 only
  std::vector<double> c1;  // thm12 only, N x n row-major
  double R = 1.0;
  double gamma = 1.0;
  Search search = Search::Auto;
  std::string seed = "default";  // default | zero | random
  /// Metric of a Laplace-Beltrami problem, in the coordinates the system is
  /// posed in; the divergence-form residual is measured against it.
  std::optional<MetricSpec> metric;
  /// Named expectations used by the tests and the acceptance suite.
  std::map<std::string, std::string> expected;
};

/// Harmonic maps from flat R^n into (R^N, g): a^i = -Gamma^i_jk(u) q^j_a q^k_a,
/// thm12 with u(0) = 0 and grad u(0) = c1 (N x n, row-major).
ProblemPreset harmonic_map_system(const MetricSpec& domain, const MetricSpec& target, int n,
                                  std::vector<double> c1);

/// Harmonic coordinates of g: Delta_g x^k = 0 with grad x^k(0) = e_k.
///
/// The principal part g^ij D_ij is normalised at 0 by the elliptic transform
/// of g^-1(0): the system is posed in y = P^T x, where the pulled-back metric
/// has inverse I at 0. Then
///   Delta u^k = sum_ij (delta_ij - g^ij) r^k_ij - sum_j b^j q^k_j,
///   b^j = (1 / sqrt g) sum_i d_i(sqrt g g^ij),
/// with the remaining metric terms vanishing at 0.
ProblemPreset harmonic_coordinates_system(const MetricSpec& metric);

/// Graph of prescribed mean curvature H(x):
///   Delta u = n H (1 + |q|^2)^(1/2) + q_i q_j r_ij / (1 + |q|^2).
/// thm11 when H(0) = 0, thm12 otherwise (the eta budget carries a(0)).
ProblemPreset mean_curvature_system(const std::string& H, int n);

struct PresetParams {
  double lambda = 1.0;   // eigenvalue
  double c = 1.0;        // critical_exponent
  std::string H = "0";   // mean_curvature
  std::optional<MetricSpec> metric;  // harmonic_coordinates / harmonic maps
  std::vector<double> c0;
  std::vector<double> c1;
};

/// Builds one preset by name for dimension n.
ProblemPreset make_preset(const std::string& name, int n, const PresetParams& params = {});

/// Names in catalogue order.
std::vector<std::string> preset_names();

/// Every preset that exists in dimension n, with default parameters.
std::vector<ProblemPreset> preset_catalog(int n);

/// max over interior nodes of |Delta_g u^k| with
/// Delta_g f = (1 / sqrt g) d_i(sqrt g g^ij d_j f), all derivatives by
/// central differences.
double laplace_beltrami_residual(const MetricSpec& metric, const GridField& u);

}  // namespace nlpoisson
