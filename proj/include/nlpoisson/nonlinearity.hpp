#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nlpoisson/expr.hpp"
#include "nlpoisson/field.hpp"

namespace nlpoisson {

/// Which existence theorem the run is certified against.
///   thm11: r-dependent, a(0) = 0, small grad_r a(0) and Hessian_r a(0)
///   thm12: first-order (or r-affine) with prescribed u(0), grad u(0)
///   thm13: autonomous, a(0) = 0, grad a(0) = 0
enum class Mode { Thm11, Thm12, Thm13 };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Right-hand side a(x, p, q, r) of Delta u = a, one tree per component.
struct NonlinearitySpec {
  int dim = 0;
  int components = 0;
  expr::VarSpace vars{1, 1};
  std::vector<expr::Expr> asts;
  std::vector<bool> depends_on_x;
  std::vector<bool> depends_on_r;
  std::string source;

  bool any_x() const;
  bool any_r() const;
  /// Value of component i at (x, p, q, r) = 0.
  double at_zero(int i) const;
};

/// Builds a spec from trees and fills the dependence flags.
NonlinearitySpec make_spec(int dim, std::vector<expr::Expr> asts);

/// Parses `aI = expr` lines (I = 1..N, each exactly once). Blank lines and
/// `#` comments are skipped. With components = 0, N is the largest I seen.
NonlinearitySpec parse_nonlinearity(std::string_view source, int dim, int components = 0);

/// Canonical text, one `aI = expr` line per component.
std::string print_spec(const NonlinearitySpec& spec);

expr::Expr diff(const NonlinearitySpec& spec, int component, int var);

/// Thm12 lift: a~(x, p, q, r) = a(x, p + c0 + c1 x, q + c1, r), so that
/// u~ = u - c0 - c1 x has zero value and gradient at the origin.
/// c1 is N x n, row-major.
NonlinearitySpec shift_spec(const NonlinearitySpec& spec, const std::vector<double>& c0,
                            const std::vector<double>& c1);

/// Compiled trees for repeated pointwise evaluation.
class CompiledSpec {
 public:
  explicit CompiledSpec(const NonlinearitySpec& spec);
  const NonlinearitySpec& spec() const noexcept { return spec_; }
  /// Variables that actually occur somewhere in the system.
  const std::vector<int>& used() const noexcept { return used_; }
  double eval(int component, std::span<const double> values) const {
    return code_[static_cast<std::size_t>(component)](values);
  }

 private:
  NonlinearitySpec spec_;
  std::vector<expr::Compiled> code_;
  std::vector<int> used_;
};

/// a(x, u(x), grad u(x), Hess u(x)) at every node, derivatives by finite
/// differences. Domain errors name the node and the subexpression.
GridField eval_on_field(const NonlinearitySpec& spec, const GridField& u);

struct HypothesisReport {
  Mode mode = Mode::Thm13;
  bool pass = true;
  std::vector<std::string> failures;
  double a0 = 0.0;          // max_i |a^i(0)|
  double grad_a0 = 0.0;     // max over all first partials at 0
  double grad_r_a0 = 0.0;   // max_i sum |d a^i / d r| at 0
  double hess_r_a0 = 0.0;   // max_i sum |d^2 a^i / d r d r| at 0
  double threshold = 0.0;   // thm11 smallness bound, 0 when unused
};

/// Structural and value conditions of the chosen theorem, evaluated at 0.
/// `thm11_threshold` bounds grad_r a(0) + Hess_r a(0) in thm11 mode.
HypothesisReport hypothesis_check(const NonlinearitySpec& spec, Mode mode,
                                  double thm11_threshold = 0.0);

}  // namespace nlpoisson
