#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlpoisson/certificate.hpp"
#include "nlpoisson/nonlinearity.hpp"
#include "nlpoisson/potential.hpp"

namespace nlpoisson {

/// h(x) = c0 + c1 x + sum_kl a_kl x_k x_l per component, a symmetric and
/// trace-free so that h is harmonic.
struct HarmonicSeed {
  int dim = 2;
  int components = 1;
  std::vector<Matrix3> a;   // per component
  std::vector<double> c0;   // N
  std::vector<double> c1;   // N x n, row-major

  /// ||h||^(2) of the quadratic part, 2 max |a_kl| (d_k d_l h = 2 a_kl).
  double norm2() const;
  bool has_affine() const;
};

/// Validates the seed against the mode and gamma0:
/// symmetric, trace-free to 1e-12, 2 max|a_kl| <= gamma0 / 2, and c0, c1
/// zero unless the mode is thm12.
HarmonicSeed make_seed(Mode mode, double gamma0, int dim, int components,
                       std::vector<Matrix3> a, std::vector<double> c0 = {},
                       std::vector<double> c1 = {});

/// a_12 = a_21 = gamma0 / 8 in every component, so h = (gamma0 / 4) x1 x2.
std::vector<Matrix3> default_seed_coefficients(int dim, int components, double gamma0);
/// Random symmetric trace-free coefficients with 2 max|a_kl| <= gamma0 / 2.
std::vector<Matrix3> random_seed_coefficients(int dim, int components, double gamma0,
                                              std::uint64_t seed);

/// Samples the quadratic part only, or the full seed with its affine part.
GridField seed_field(const HarmonicSeed& seed, const GridPtr& grid, bool with_affine,
                     double alpha = 0.5);

struct ThetaResult {
  GridField theta;
  GridField omega;                     // N(a(u))
  std::vector<Matrix3> omega_hessian;  // subtraction-formula Hessian of omega at 0
};

/// Theta(u) = omega - omega(0) - grad omega(0) . x - 1/2 sum_{k != l} H_kl x_k x_l,
/// omega = N(a(x, u, grad u, Hess u)). Value and gradient at 0 come from
/// central stencils, H from the subtraction formula at the origin node.
ThetaResult theta(const GridField& u, const NonlinearitySpec& spec, const NewtonianOperator& op);

/// Richardson estimate |D_h f(0) - D_2h f(0)| of a central stencil at the origin.
double stencil_truncation(const GridField& f, int comp, const MultiIndex& beta);

/// Anchoring of Theta(u) at the origin. Each entry is compared with the
/// stencil truncation estimate of omega for the same derivative; the fields
/// hold the largest measured value and the largest value / estimate ratio.
struct AnchorCheck {
  double value = 0, value_ratio = 0;
  double gradient = 0, gradient_ratio = 0;
  double off_diagonal = 0, off_diagonal_ratio = 0;
  bool within(double factor) const;
};
AnchorCheck check_anchoring(const ThetaResult& t);

enum class Radiality { NonRadial, PossiblyRadial };
std::string to_string(Radiality r);

struct RadialityVerdict {
  Radiality verdict = Radiality::PossiblyRadial;
  int component = -1;      // first component that is not lambda I
  double deviation = 0.0;  // max_c |H_c - (tr H_c / n) I|_max
  std::string witness;
};

/// Non-radial iff some component's Hessian differs from (tr H / n) I by more
/// than tol in some entry.
RadialityVerdict radiality_check(const std::vector<Matrix3>& hessians, int dim, double tol);

struct SolveOptions {
  int resolution = 32;
  double tol = 0.0;      // <= 0: 1e-8 gamma0
  int max_iter = 200;
  int min_iter = 3;      // so that contraction ratios are observed; an exact fixed point stops at once
  bool force = false;
  double alpha = 0.5;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;  // ||u_{m+1} - u_m||^(2)
  std::vector<double> ratios;   // successive quotients, 0 where undefined
  double rho_hat = 0.0;         // median of the defined quotients
  double final_residual = 0.0;  // max interior |Delta u - a|
  std::vector<Matrix3> hessian_at_origin;  // Hess h + diag of the omega Hessian
  std::vector<Matrix3> hessian_stencil;    // central differences of u at 0
  std::vector<double> gradient_at_origin;  // N x n, central differences
  std::vector<double> value_at_origin;     // N
  double stencil_tol = 0.0;
  RadialityVerdict radiality;
  ContractionCertificate certificate;
  std::optional<GridField> solution;
  double gamma0 = 0.0;
  double R = 0.0;
};

/// Picard iteration u_{m+1} = h + Theta(u_m) from u_0 = h at the certificate's
/// (R, gamma0). For thm12 the iteration runs on u - c0 - c1 x with the
/// shifted system and the affine part is added back at the end.
/// Throws RefusedError when the certificate is not admissible and force is
/// off, and DivergenceError after five consecutive doublings.
SolveReport solve(const NonlinearitySpec& spec, Mode mode, const HarmonicSeed& seed,
                  const ContractionCertificate& certificate, const SolveOptions& options = {});

/// max over interior nodes of |Delta u - a(x, u, grad u, Hess u)|.
double pde_residual(const NonlinearitySpec& spec, const GridField& u);

/// P with P^T A0 P = I from A0 = L L^T, P = L^-T. The substitution y = P^T x
/// turns tr(A0 D^2 u) into the Laplacian in y.
struct EllipticTransform {
  int dim = 2;
  Matrix3 P{};
  Matrix3 P_inv{};
};
EllipticTransform elliptic_transform(const Matrix3& A0, int dim);

}  // namespace nlpoisson
