#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "manifold.hpp"
#include "rational.hpp"

namespace hamreach {

enum class Op : std::uint8_t {
  Const,  // exact rational
  Pi,     // symbolic pi, numeric only at evaluation
  Var,    // x_i, p_i or t (flat index, see Manifold::var_name)
  Sin,
  Cos,
  Exp,
  Neg,  // transient: parser/derivative output, removed by simplification
  Add,  // n-ary in canonical form
  Sub,  // transient
  Mul,  // n-ary in canonical form
  Div,  // transient (becomes mul by inverse power)
  Pow,  // integer exponent
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  Rational value;           // Const
  int var = -1;             // Var
  std::int64_t expo = 0;    // Pow
  std::vector<NodePtr> kids;
  std::uint32_t depmask = 0;  // bit i set iff variable i occurs
  std::size_t hash = 0;
};

// Node factories (no simplification).
NodePtr nconst(const Rational& r);
NodePtr npi();
NodePtr nvar(int index);
NodePtr nun(Op op, NodePtr kid);
NodePtr nbin(Op op, NodePtr a, NodePtr b);
NodePtr nnary(Op op, std::vector<NodePtr> kids);
NodePtr npow(NodePtr base, std::int64_t exponent);

// Deterministic total order on trees; 0 iff structurally equal.
int node_cmp(const NodePtr& a, const NodePtr& b);
bool node_eq(const NodePtr& a, const NodePtr& b);

// Canonicalization: constant folding, 0/1 identities, flattening and ordered
// like-term collection for sums/products. Idempotent by construction.
NodePtr simplify_node(const NodePtr& n);

// Raw derivative (unsimplified).
NodePtr diff_node(const NodePtr& n, int var);

double eval_node(const Node* n, std::span<const double> z);

// Immutable symbolic expression bound to a manifold. All public constructors
// produce simplified (canonical) trees; operations are pure.
class Expr {
 public:
  Expr() = default;

  // Parses source text, enforcing variable range and the syntactic
  // periodicity rule for circle coordinates. Throws ParseError.
  static Expr parse(const std::string& source, ManifoldPtr manifold);

  static Expr constant(const Rational& r, ManifoldPtr manifold);
  static Expr variable(int index, ManifoldPtr manifold);
  static Expr pi(ManifoldPtr manifold);

  bool valid() const { return root_ != nullptr; }
  const NodePtr& root() const { return root_; }
  const ManifoldPtr& manifold() const { return manifold_; }

  // Exact partial derivative with respect to variable `index`, simplified.
  Expr diff(int index) const;
  Expr diff_x(int i) const { return diff(i); }
  Expr diff_p(int i) const { return diff(manifold_->d() + i); }
  Expr diff_t() const;

  // Numerical value at a point (x_1..x_d, p_1..p_d[, t]); fixed evaluation
  // order. Throws DomainError on division by zero, ManifoldError on shape.
  double eval(std::span<const double> z) const;

  // Replace variable `index` by an exact rational constant; result simplified.
  Expr substitute(int index, const Rational& value) const;

  std::string str() const;

  bool structurally_equal(const Expr& o) const { return node_eq(root_, o.root_); }
  bool is_zero() const { return root_->op == Op::Const && root_->value.is_zero(); }
  bool is_constant() const { return root_->depmask == 0; }
  bool depends_on(int index) const { return (root_->depmask >> index) & 1u; }
  std::uint32_t depmask() const { return root_->depmask; }

  // Arithmetic on expressions over the same manifold (results simplified).
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr pow(std::int64_t e) const;

  // Wraps an already-built tree (simplifies it).
  Expr(ManifoldPtr manifold, NodePtr raw);

 private:
  ManifoldPtr manifold_;
  NodePtr root_;
};

Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);

}  // namespace hamreach
