#include "poisson.hpp"

#include <cmath>

#include "rng.hpp"

namespace hamreach {

Expr bracket(const Expr& f, const Expr& g) {
  if (*f.manifold() != *g.manifold())
    throw ManifoldError("bracket of expressions on different manifolds");
  const auto& m = f.manifold();
  if (node_eq(f.root(), g.root())) return Expr::constant(Rational(0), m);

  int d = m->d();
  std::vector<NodePtr> terms;
  terms.reserve(2 * d);
  for (int i = 0; i < d; ++i) {
    NodePtr df_p = diff_node(f.root(), d + i);
    NodePtr dg_x = diff_node(g.root(), i);
    NodePtr df_x = diff_node(f.root(), i);
    NodePtr dg_p = diff_node(g.root(), d + i);
    terms.push_back(nbin(Op::Mul, df_p, dg_x));
    terms.push_back(nun(Op::Neg, nbin(Op::Mul, df_x, dg_p)));
  }
  return Expr(m, nnary(Op::Add, std::move(terms)));
}

BracketChain chain(const Expr& h1, const Expr& h2, int m) {
  if (m < 0) throw InvalidArgument("chain length must be non-negative");
  BracketChain c;
  c.h1 = h1;
  c.h2 = h2;
  c.m = m;
  c.entries.reserve(m + 1);
  c.entries.push_back(h2);
  for (int j = 1; j <= m; ++j) c.entries.push_back(bracket(h1, c.entries.back()));
  return c;
}

namespace {

// d/dx1 - d/dt on the extended manifold.
Expr flowbox_op(const Expr& e) {
  return Expr(e.manifold(),
              nbin(Op::Sub, diff_node(e.root(), 0),
                   diff_node(e.root(), e.manifold()->time_index())));
}

void require_flowbox_normalized(const Expr& h1, const Rational& t0) {
  const auto& m = h1.manifold();
  Expr at_t0 = h1.substitute(m->time_index(), t0);
  Expr p1 = Expr::variable(m->d(), m);
  if (at_t0.structurally_equal(p1)) return;
  // Fall back to a numerical check on random points.
  Rng rng(0x5eedULL);
  std::vector<double> z(m->var_count(), 0.0);
  for (int trial = 0; trial < 32; ++trial) {
    for (int i = 0; i < m->dim(); ++i)
      z[i] = m->is_circle(i) ? rng.uniform(0.0, m->period(i)) : rng.uniform(-2.0, 2.0);
    if (m->has_time()) z[m->time_index()] = t0.to_double();
    double diff = std::abs(at_t0.eval(z) - z[m->d()]);
    if (!(diff <= 1e-9))
      throw InvalidArgument("extended_chain requires H1(.,t0) = p1 in the working chart");
  }
}

}  // namespace

std::vector<Expr> extended_chain(const Expr& h1, const Expr& h2, int m,
                                 const Rational& t0) {
  if (m < 1) throw InvalidArgument("extended chain needs m >= 1");
  if (*h1.manifold() != *h2.manifold())
    throw ManifoldError("extended chain of expressions on different manifolds");
  const auto& man = h1.manifold();
  if (!man->has_time())
    throw InvalidArgument("extended chain needs a manifold with a time factor");
  require_flowbox_normalized(h1, t0);

  int t_idx = man->time_index();
  std::vector<Expr> out;
  out.reserve(m);
  Expr d_h2 = h2;              // (d/dx1 - d/dt)^j H2
  Expr d_h1 = h1.diff(t_idx);  // (d/dx1 - d/dt)^{j-1} dH1/dt
  for (int j = 1; j <= m; ++j) {
    d_h2 = flowbox_op(d_h2);
    if (j > 1) d_h1 = flowbox_op(d_h1);
    Expr k = d_h2 + d_h1;
    out.push_back(k.substitute(t_idx, t0));
  }
  return out;
}

}  // namespace hamreach
