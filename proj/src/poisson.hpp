#pragma once

#include <vector>

#include "expr.hpp"
#include "rational.hpp"

namespace hamreach {

// Poisson bracket in Darboux coordinates with the convention
//   {F,G} = sum_i dF/dp_i * dG/dx_i - dF/dx_i * dG/dp_i,
// so that {p1, G} = dG/dx1. For time-dependent inputs the bracket is taken in
// the 2d symplectic variables only (t acts as a parameter). Computed
// symbolically, never by numerical differentiation.
Expr bracket(const Expr& f, const Expr& g);

// B_0 = H2, B_j = {H1, B_{j-1}} for j = 1..m.
struct BracketChain {
  Expr h1, h2;
  std::vector<Expr> entries;  // m+1 entries
  int m = 0;
};

BracketChain chain(const Expr& h1, const Expr& h2, int m);

// Closed form for the m-fold bracket of extended fields at t = t0, valid when
// H1(.,t0) = p1 in the chart:
//   K_m = (d/dx1 - d/dt)^m H2 + (d/dx1 - d/dt)^{m-1} dH1/dt, evaluated at t0.
// Returns [K_1 .. K_m] with t already substituted by t0.
std::vector<Expr> extended_chain(const Expr& h1, const Expr& h2, int m,
                                 const Rational& t0);

}  // namespace hamreach
