#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlpoisson::expr {

enum class Op {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Pow,     // b^s with constant real s
  Exp,
  Ln,
  Sin,
  Cos,
  Sqrt,
  AbsPow,  // |t|^s, constant s >= 0
  SgnPow,  // sign(t)|t|^s, constant s >= 0
};

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const value, or the exponent of Pow/AbsPow/SgnPow
  int var = -1;
  Expr a;
  Expr b;
};

/// Variable layout for a system with n space dimensions and N components:
///   x_k            -> k
///   p_j            -> n + j
///   q^j_k          -> n + N + j n + k
///   r^j_kl (k<=l)  -> n + N + N n + j P + sym_index(k, l),   P = n(n+1)/2
/// All indices zero-based.
class VarSpace {
 public:
  VarSpace(int dim, int components);

  int dim() const noexcept { return n_; }
  int components() const noexcept { return N_; }
  int size() const noexcept { return n_ + N_ + N_ * n_ + N_ * pairs_; }
  int pairs() const noexcept { return pairs_; }

  int x(int k) const noexcept { return k; }
  int p(int j) const noexcept { return n_ + j; }
  int q(int j, int k) const noexcept { return n_ + N_ + j * n_ + k; }
  int r(int j, int k, int l) const noexcept;

  enum class Kind { X, P, Q, R };
  Kind kind(int var) const noexcept;
  std::string name(int var) const;

 private:
  int n_;
  int N_;
  int pairs_;
};

// Smart constructors; each applies local simplification (constant folding,
// 0/1 elimination, a - a -> 0, double negation).
Expr constant(double v);
Expr variable(int id);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr neg(Expr a);
Expr pow(Expr base, Expr exponent);
Expr exp(Expr a);
Expr ln(Expr a);
Expr sin(Expr a);
Expr cos(Expr a);
Expr sqrt(Expr a);
Expr abs_pow(Expr t, double s);
Expr sgn_pow(Expr t, double s);

bool is_const(const Expr& e, double v);
bool is_const(const Expr& e);
bool equal(const Expr& a, const Expr& b);

/// Parses one right-hand side. `line` and `column_offset` locate errors in
/// the enclosing source.
Expr parse(std::string_view text, const VarSpace& vars, int line = 1, int column_offset = 0);

/// Fully parenthesised text that parses back to an identical tree.
std::string print(const Expr& e, const VarSpace& vars);

/// Symbolic partial derivative. Throws DomainError for |t|^s with s <= 1
/// (and sign(t)|t|^s with s < 1), which are not C^1 at t = 0.
Expr diff(const Expr& e, int var);

/// Replaces variable v by replacement[v] wherever that entry is non-null.
Expr substitute(const Expr& e, std::span<const Expr> replacement);

/// Variables that occur in the tree, as a sorted list of ids.
std::vector<int> variables(const Expr& e);

/// Postfix program for fast repeated evaluation.
class Compiled {
 public:
  Compiled() = default;
  Compiled(const Expr& e, const VarSpace& vars);

  /// Throws DomainError naming the offending subexpression.
  double operator()(std::span<const double> values) const;
  bool is_constant() const noexcept { return code_.size() == 1 && code_[0].op == Op::Const; }
  const Expr& source() const noexcept { return source_; }

 private:
  struct Instr {
    Op op;
    double value;
    int var;
    const Node* node;
  };
  std::vector<Instr> code_;
  std::size_t depth_ = 0;
  Expr source_;
  std::shared_ptr<const VarSpace> vars_;
};

}  // namespace nlpoisson::expr
