#pragma once

#include <string>
#include <vector>

#include "nlpoisson/nonlinearity.hpp"

namespace nlpoisson {

/// E(R, gamma): x in the ball of radius R, |p| <= C_p R^2 gamma,
/// |q| <= C_q R gamma, |r| <= C_r gamma, entrywise.
struct EBox {
  int dim = 2;
  int components = 1;
  double R = 1.0;
  double gamma = 1.0;

  static double c_p(int n) { return 9.0 * n * n / 2.0; }
  static double c_q(int n) { return 3.0 * n; }
  static constexpr double c_r = 2.0;

  double p_bound() const { return c_p(dim) * R * R * gamma; }
  double q_bound() const { return c_q(dim) * R * gamma; }
  double r_bound() const { return c_r * gamma; }
};

/// Sup, Hoelder and r-Lipschitz constants of the first partials of a over E.
///   A: d/dp   B: d/dq   C: d/dr   D: d/dx
/// Each sup is an entrywise maximum over (component, variable). All values
/// come from sampling and are lower bounds of the continuum suprema.
struct ConstantTable {
  double A = 0, B = 0, C = 0, D = 0;
  double HA = 0, HB = 0, HC = 0, HD = 0;  // Hoelder in (x, p, q), max norm
  double H1A = 0, H1B = 0, H1C = 0, H1D = 0;  // Lipschitz in r, l1 norm
  double a0 = 0;  // max_i |a^i(0)|
  long samples = 0;
  std::string label = "lower-bound-empirical";
};

struct BoundOptions {
  int samples_per_axis = 5;
  long budget = 1L << 15;  // points per partial before switching to a Halton set
  double alpha = 0.5;
};

ConstantTable bound_constants(const NonlinearitySpec& spec, const EBox& box,
                              const BoundOptions& options = {});

/// Aggregation constant of the norm algebra behind delta and eta:
///   K = (1 + n^2) * (9 n^2 / 2) * N.
/// The first factor counts omega plus the n^2 origin-Hessian terms of Theta,
/// the second is the largest of the per-family prefactors N (3n)^2 / 2 (p),
/// n N 3n (q) and n^2 N (r).
double aggregation_constant(int n, int N);

struct DeltaEta {
  double delta_A = 0, delta_B = 0, delta_C = 0, delta_D = 0;
  double delta = 0;
  double eta = 0;
};

DeltaEta delta_eta(const ConstantTable& table, double c_op, double K, const EBox& box,
                   double alpha);

/// Empirical C(n, alpha), probed once per (n, alpha) at R = 1, m = 16 and
/// cached for the process.
double operator_constant(int n, double alpha = 0.5);

enum class Search { Auto, None, Gamma, Radius, Both };

struct CertifyOptions {
  double R = 1.0;
  double gamma = 1.0;
  int max_steps = 40;
  Search search = Search::Auto;  // Auto: gamma for thm13, R otherwise
  double alpha = 0.5;
  double c_op = 0.0;  // <= 0: use operator_constant
  int samples_per_axis = 5;
  std::vector<double> c0;  // thm12 initial value, empty means zero
  std::vector<double> c1;  // thm12 initial gradient, N x n row-major
};

struct ContractionCertificate {
  Mode mode = Mode::Thm13;
  EBox box;
  ConstantTable table;
  double c_op = 0;
  double K = 0;
  double alpha = 0.5;
  DeltaEta bounds;
  HypothesisReport hypothesis;
  bool admissible = false;
  std::string binding = "none";  // none | hypothesis | domain | delta | eta
  std::string domain_error;       // set when a failed to evaluate inside the box
  int steps = 0;                  // sweep points examined
  std::string spec_text;          // the certified (shifted) system
};

/// Certificate at one (R, gamma).
ContractionCertificate certify(const NonlinearitySpec& spec, Mode mode, const EBox& box,
                               const CertifyOptions& options = {});

/// Halving sweep over the mode's free parameter; returns the first admissible
/// point, or the last point examined with its binding constraint.
///   thm13: R fixed, gamma = gamma_hi 2^-j
///   thm11, thm12: gamma0 = max(gamma_hi, 8 C_op K |a(0)|), R = R_hi 2^-j
ContractionCertificate search_admissible(const NonlinearitySpec& spec, Mode mode,
                                         const CertifyOptions& options = {});

struct SweepRow {
  double R = 0;
  double gamma = 0;
  double delta = 0;
  double eta = 0;
  bool admissible = false;
  std::string binding;
};

/// Every point of the sweep lattice (no early exit).
std::vector<SweepRow> sweep(const NonlinearitySpec& spec, Mode mode,
                            const CertifyOptions& options = {});

/// Flat `key = value` report; hypothesis failures as `hypothesis: ...` lines.
std::string serialize(const ContractionCertificate& cert);

Search parse_search(const std::string& text);
std::string to_string(Search search);

}  // namespace nlpoisson
