#include "expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace hamreach {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::int64_t checked_expo_mul(std::int64_t a, std::int64_t b) {
  __int128 r = __int128(a) * b;
  if (r > INT64_MAX || r < INT64_MIN) throw Error("exponent overflow");
  return static_cast<std::int64_t>(r);
}

}  // namespace

NodePtr make_node(Op op, Rational value, int var, std::int64_t expo,
                  std::vector<NodePtr> kids) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->var = var;
  n->expo = expo;
  n->kids = std::move(kids);
  std::uint32_t mask = 0;
  std::size_t h = static_cast<std::size_t>(op) * 0x100000001b3ull;
  h = mix(h, std::hash<std::int64_t>{}(value.num()));
  h = mix(h, std::hash<std::int64_t>{}(value.den()));
  h = mix(h, std::hash<int>{}(var));
  h = mix(h, std::hash<std::int64_t>{}(expo));
  if (op == Op::Var) mask |= 1u << var;
  for (const auto& k : n->kids) {
    mask |= k->depmask;
    h = mix(h, k->hash);
  }
  n->depmask = mask;
  n->hash = h;
  return n;
}

NodePtr nconst(const Rational& r) { return make_node(Op::Const, r, -1, 0, {}); }
NodePtr npi() { return make_node(Op::Pi, Rational(0), -1, 0, {}); }
NodePtr nvar(int index) { return make_node(Op::Var, Rational(0), index, 0, {}); }
NodePtr nun(Op op, NodePtr kid) { return make_node(op, Rational(0), -1, 0, {std::move(kid)}); }
NodePtr nbin(Op op, NodePtr a, NodePtr b) {
  return make_node(op, Rational(0), -1, 0, {std::move(a), std::move(b)});
}
NodePtr nnary(Op op, std::vector<NodePtr> kids) {
  return make_node(op, Rational(0), -1, 0, std::move(kids));
}
NodePtr npow(NodePtr base, std::int64_t exponent) {
  return make_node(Op::Pow, Rational(0), -1, exponent, {std::move(base)});
}

namespace {

int op_rank(Op op) {
  switch (op) {
    case Op::Const: return 0;
    case Op::Pi: return 1;
    case Op::Var: return 2;
    case Op::Sin: return 3;
    case Op::Cos: return 4;
    case Op::Exp: return 5;
    case Op::Pow: return 6;
    case Op::Mul: return 7;
    case Op::Add: return 8;
    case Op::Div: return 9;
    case Op::Sub: return 10;
    case Op::Neg: return 11;
  }
  return 12;
}

}  // namespace

int node_cmp(const NodePtr& a, const NodePtr& b) {
  if (a.get() == b.get()) return 0;
  int ra = op_rank(a->op), rb = op_rank(b->op);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a->op) {
    case Op::Const:
      if (a->value == b->value) return 0;
      return a->value < b->value ? -1 : 1;
    case Op::Pi:
      return 0;
    case Op::Var:
      return a->var == b->var ? 0 : (a->var < b->var ? -1 : 1);
    case Op::Pow: {
      int c = node_cmp(a->kids[0], b->kids[0]);
      if (c != 0) return c;
      return a->expo == b->expo ? 0 : (a->expo < b->expo ? -1 : 1);
    }
    default: {
      std::size_t n = std::min(a->kids.size(), b->kids.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = node_cmp(a->kids[i], b->kids[i]);
        if (c != 0) return c;
      }
      if (a->kids.size() != b->kids.size())
        return a->kids.size() < b->kids.size() ? -1 : 1;
      return 0;
    }
  }
}

bool node_eq(const NodePtr& a, const NodePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash) return false;
  return node_cmp(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

namespace {

NodePtr canon_mul(std::vector<NodePtr> kids);
NodePtr canon_add(std::vector<NodePtr> kids);

NodePtr canon_pow(const NodePtr& base, std::int64_t e) {
  if (e == 0) return nconst(Rational(1));
  if (e == 1) return base;
  if (base->op == Op::Const) {
    if (base->value.is_zero() && e < 0) return npow(base, e);  // domain error at eval
    return nconst(base->value.pow(e));
  }
  if (base->op == Op::Pow) return canon_pow(base->kids[0], checked_expo_mul(base->expo, e));
  if (base->op == Op::Mul) {
    std::vector<NodePtr> out;
    out.reserve(base->kids.size());
    for (const auto& k : base->kids) out.push_back(canon_pow(k, e));
    return canon_mul(std::move(out));
  }
  return npow(base, e);
}

NodePtr canon_mul(std::vector<NodePtr> kids) {
  Rational coeff(1);
  std::vector<std::pair<NodePtr, std::int64_t>> factors;
  std::vector<NodePtr> work(std::move(kids));
  bool kept_bad_pow = false;
  std::vector<NodePtr> bad;  // pow(0, negative) placeholders, kept verbatim
  for (std::size_t i = 0; i < work.size(); ++i) {
    NodePtr k = work[i];  // copy: the loop below may reallocate `work`
    switch (k->op) {
      case Op::Const:
        coeff = coeff * k->value;
        break;
      case Op::Mul:
        for (const auto& kk : k->kids) work.push_back(kk);
        break;
      case Op::Pow:
        if (k->kids[0]->op == Op::Const) {  // only the 0^negative case survives
          kept_bad_pow = true;
          bad.push_back(k);
        } else {
          factors.emplace_back(k->kids[0], k->expo);
        }
        break;
      default:
        factors.emplace_back(k, 1);
    }
  }
  if (coeff.is_zero() && !kept_bad_pow) return nconst(Rational(0));

  std::sort(factors.begin(), factors.end(),
            [](const auto& a, const auto& b) { return node_cmp(a.first, b.first) < 0; });
  std::vector<NodePtr> out;
  for (std::size_t i = 0; i < factors.size();) {
    NodePtr base = factors[i].first;
    std::int64_t e = factors[i].second;
    std::size_t j = i + 1;
    while (j < factors.size() && node_cmp(base, factors[j].first) == 0) {
      __int128 s = __int128(e) + factors[j].second;
      if (s > INT64_MAX || s < INT64_MIN) throw Error("exponent overflow");
      e = static_cast<std::int64_t>(s);
      ++j;
    }
    if (e != 0) out.push_back(e == 1 ? base : npow(base, e));
    i = j;
  }
  for (const auto& b : bad) out.push_back(b);

  if (out.empty()) return nconst(coeff);
  if (coeff.is_one() && out.size() == 1) return out[0];
  std::vector<NodePtr> all;
  if (!coeff.is_one()) all.push_back(nconst(coeff));
  for (auto& o : out) all.push_back(std::move(o));
  if (all.size() == 1) return all[0];
  return nnary(Op::Mul, std::move(all));
}

// Splits a canonical term into (rational coefficient, monomial part).
std::pair<Rational, NodePtr> split_coeff(const NodePtr& term) {
  if (term->op == Op::Mul && term->kids[0]->op == Op::Const) {
    Rational c = term->kids[0]->value;
    if (term->kids.size() == 2) return {c, term->kids[1]};
    std::vector<NodePtr> rest(term->kids.begin() + 1, term->kids.end());
    return {c, nnary(Op::Mul, std::move(rest))};
  }
  return {Rational(1), term};
}

NodePtr with_coeff(const Rational& c, const NodePtr& mono) {
  if (c.is_one()) return mono;
  std::vector<NodePtr> kids;
  kids.push_back(nconst(c));
  if (mono->op == Op::Mul)
    for (const auto& k : mono->kids) kids.push_back(k);
  else
    kids.push_back(mono);
  return nnary(Op::Mul, std::move(kids));
}

NodePtr canon_add(std::vector<NodePtr> kids) {
  Rational csum(0);
  std::vector<std::pair<NodePtr, Rational>> terms;  // monomial -> coefficient
  std::vector<NodePtr> work(std::move(kids));
  for (std::size_t i = 0; i < work.size(); ++i) {
    NodePtr k = work[i];  // copy: the loop below may reallocate `work`
    if (k->op == Op::Const) {
      csum = csum + k->value;
    } else if (k->op == Op::Add) {
      for (const auto& kk : k->kids) work.push_back(kk);
    } else {
      auto [c, mono] = split_coeff(k);
      terms.emplace_back(mono, c);
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return node_cmp(a.first, b.first) < 0; });
  std::vector<NodePtr> out;
  for (std::size_t i = 0; i < terms.size();) {
    NodePtr mono = terms[i].first;
    Rational c = terms[i].second;
    std::size_t j = i + 1;
    while (j < terms.size() && node_cmp(mono, terms[j].first) == 0) {
      c = c + terms[j].second;
      ++j;
    }
    if (!c.is_zero()) out.push_back(with_coeff(c, mono));
    i = j;
  }
  if (!csum.is_zero()) out.push_back(nconst(csum));
  if (out.empty()) return nconst(Rational(0));
  if (out.size() == 1) return out[0];
  std::sort(out.begin(), out.end(),
            [](const NodePtr& a, const NodePtr& b) { return node_cmp(a, b) < 0; });
  return nnary(Op::Add, std::move(out));
}

bool has_negative_lead(const NodePtr& n) {
  if (n->op == Op::Const) return n->value.negative();
  if (n->op == Op::Mul && n->kids[0]->op == Op::Const) return n->kids[0]->value.negative();
  return false;
}

NodePtr canon_un(Op op, const NodePtr& arg) {
  if (arg->op == Op::Const && arg->value.is_zero()) {
    if (op == Op::Sin) return nconst(Rational(0));
    return nconst(Rational(1));  // cos(0), exp(0)
  }
  if ((op == Op::Sin || op == Op::Cos) && has_negative_lead(arg)) {
    NodePtr flipped = canon_mul({nconst(Rational(-1)), arg});
    if (op == Op::Cos) return nun(Op::Cos, flipped);
    return canon_mul({nconst(Rational(-1)), nun(Op::Sin, flipped)});
  }
  return nun(op, arg);
}

NodePtr simp_impl(const NodePtr& n, std::unordered_map<const Node*, NodePtr>& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr r;
  switch (n->op) {
    case Op::Const:
    case Op::Pi:
    case Op::Var:
      r = n;
      break;
    case Op::Neg:
      r = canon_mul({nconst(Rational(-1)), simp_impl(n->kids[0], memo)});
      break;
    case Op::Sub:
      r = canon_add({simp_impl(n->kids[0], memo),
                     canon_mul({nconst(Rational(-1)), simp_impl(n->kids[1], memo)})});
      break;
    case Op::Add: {
      std::vector<NodePtr> ks;
      ks.reserve(n->kids.size());
      for (const auto& k : n->kids) ks.push_back(simp_impl(k, memo));
      r = canon_add(std::move(ks));
      break;
    }
    case Op::Mul: {
      std::vector<NodePtr> ks;
      ks.reserve(n->kids.size());
      for (const auto& k : n->kids) ks.push_back(simp_impl(k, memo));
      r = canon_mul(std::move(ks));
      break;
    }
    case Op::Div:
      r = canon_mul({simp_impl(n->kids[0], memo), canon_pow(simp_impl(n->kids[1], memo), -1)});
      break;
    case Op::Pow:
      r = canon_pow(simp_impl(n->kids[0], memo), n->expo);
      break;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
      r = canon_un(n->op, simp_impl(n->kids[0], memo));
      break;
  }
  memo.emplace(n.get(), r);
  return r;
}

}  // namespace

NodePtr simplify_node(const NodePtr& n) {
  std::unordered_map<const Node*, NodePtr> memo;
  return simp_impl(n, memo);
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

NodePtr diff_impl(const NodePtr& n, int v, std::unordered_map<const Node*, NodePtr>& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr r;
  switch (n->op) {
    case Op::Const:
    case Op::Pi:
      r = nconst(Rational(0));
      break;
    case Op::Var:
      r = nconst(Rational(n->var == v ? 1 : 0));
      break;
    case Op::Sin:
      r = nbin(Op::Mul, nun(Op::Cos, n->kids[0]), diff_impl(n->kids[0], v, memo));
      break;
    case Op::Cos:
      r = nnary(Op::Mul, {nconst(Rational(-1)), nun(Op::Sin, n->kids[0]),
                          diff_impl(n->kids[0], v, memo)});
      break;
    case Op::Exp:
      r = nbin(Op::Mul, nun(Op::Exp, n->kids[0]), diff_impl(n->kids[0], v, memo));
      break;
    case Op::Neg:
      r = nun(Op::Neg, diff_impl(n->kids[0], v, memo));
      break;
    case Op::Add:
    case Op::Sub: {
      std::vector<NodePtr> ks;
      ks.reserve(n->kids.size());
      for (const auto& k : n->kids) ks.push_back(diff_impl(k, v, memo));
      r = n->op == Op::Add ? nnary(Op::Add, std::move(ks)) : nbin(Op::Sub, ks[0], ks[1]);
      break;
    }
    case Op::Mul: {
      std::vector<NodePtr> terms;
      for (std::size_t i = 0; i < n->kids.size(); ++i) {
        if (!((n->kids[i]->depmask >> v) & 1u)) continue;
        std::vector<NodePtr> prod = n->kids;
        prod[i] = diff_impl(n->kids[i], v, memo);
        terms.push_back(nnary(Op::Mul, std::move(prod)));
      }
      r = terms.empty() ? nconst(Rational(0)) : nnary(Op::Add, std::move(terms));
      break;
    }
    case Op::Div: {
      const NodePtr& a = n->kids[0];
      const NodePtr& b = n->kids[1];
      NodePtr da = diff_impl(a, v, memo);
      NodePtr db = diff_impl(b, v, memo);
      r = nbin(Op::Div, nbin(Op::Sub, nbin(Op::Mul, da, b), nbin(Op::Mul, a, db)),
               nbin(Op::Mul, b, b));
      break;
    }
    case Op::Pow: {
      const NodePtr& b = n->kids[0];
      r = nnary(Op::Mul, {nconst(Rational(n->expo)), npow(b, n->expo - 1),
                          diff_impl(b, v, memo)});
      break;
    }
  }
  memo.emplace(n.get(), r);
  return r;
}

}  // namespace

NodePtr diff_node(const NodePtr& n, int var) {
  std::unordered_map<const Node*, NodePtr> memo;
  return diff_impl(n, var, memo);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double powi_double(double x, std::int64_t e) {
  if (e < 0) {
    if (x == 0.0) throw DomainError("zero raised to a negative power");
    return 1.0 / powi_double(x, -e);
  }
  double acc = 1.0, b = x;
  auto nrem = static_cast<std::uint64_t>(e);
  while (nrem > 0) {
    if (nrem & 1) acc *= b;
    nrem >>= 1;
    if (nrem) b *= b;
  }
  return acc;
}

}  // namespace

double eval_node(const Node* n, std::span<const double> z) {
  switch (n->op) {
    case Op::Const:
      return n->value.to_double();
    case Op::Pi:
      return std::numbers::pi;
    case Op::Var:
      if (n->var < 0 || static_cast<std::size_t>(n->var) >= z.size())
        throw ManifoldError("point dimension does not match expression");
      return z[n->var];
    case Op::Sin:
      return std::sin(eval_node(n->kids[0].get(), z));
    case Op::Cos:
      return std::cos(eval_node(n->kids[0].get(), z));
    case Op::Exp:
      return std::exp(eval_node(n->kids[0].get(), z));
    case Op::Neg:
      return -eval_node(n->kids[0].get(), z);
    case Op::Add: {
      double s = 0.0;
      for (const auto& k : n->kids) s += eval_node(k.get(), z);
      return s;
    }
    case Op::Sub:
      return eval_node(n->kids[0].get(), z) - eval_node(n->kids[1].get(), z);
    case Op::Mul: {
      double s = 1.0;
      for (const auto& k : n->kids) s *= eval_node(k.get(), z);
      return s;
    }
    case Op::Div: {
      double a = eval_node(n->kids[0].get(), z);
      double b = eval_node(n->kids[1].get(), z);
      if (b == 0.0) throw DomainError("division by zero");
      return a / b;
    }
    case Op::Pow:
      return powi_double(eval_node(n->kids[0].get(), z), n->expo);
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& src;
  const Manifold& manifold;
  std::size_t pos = 0;

  Parser(const std::string& s, const Manifold& m) : src(s), manifold(m) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < src.size() && src[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = nbin(Op::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = nbin(Op::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = nbin(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        std::size_t at = pos;
        NodePtr rhs = parse_unary();
        if (rhs->op == Op::Const && rhs->value.is_zero())
          throw ParseError("division by the literal zero constant", at);
        lhs = nbin(Op::Div, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return nun(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    skip_ws();
    if (pos < src.size() && src[pos] == '^') {
      ++pos;
      std::int64_t e = parse_int_exponent();
      return npow(base, e);
    }
    return base;
  }

  std::int64_t parse_int_exponent() {
    skip_ws();
    std::size_t at = pos;
    bool neg = false;
    if (pos < src.size() && (src[pos] == '-' || src[pos] == '+')) {
      neg = src[pos] == '-';
      ++pos;
    }
    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
      throw ParseError("pow exponents must be integer literals", at);
    std::int64_t e = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      e = e * 10 + (src[pos] - '0');
      if (e > 1000000) throw ParseError("exponent out of range", at);
      ++pos;
    }
    if (pos < src.size() && src[pos] == '.')
      throw ParseError("pow exponents must be integer literals", at);
    return neg ? -e : e;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= src.size()) throw ParseError("unexpected end of input", pos);
    char c = src[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  NodePtr parse_number() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.'))
      ++pos;
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      } else {
        pos = mark;  // the 'e' belongs to something else; not part of the literal
      }
    }
    try {
      return nconst(Rational::from_decimal(src.substr(start, pos - start)));
    } catch (const Error& e) {
      throw ParseError(e.what(), start);
    }
  }

  NodePtr parse_ident() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string name = src.substr(start, pos - start);
    if (name == "pi") return npi();
    if (name == "sin" || name == "cos" || name == "exp") {
      expect('(');
      NodePtr arg = parse_expr();
      expect(')');
      Op op = name == "sin" ? Op::Sin : (name == "cos" ? Op::Cos : Op::Exp);
      return nun(op, arg);
    }
    if (name == "t") {
      if (!manifold.has_time())
        throw ParseError("variable 't' needs a manifold with a time factor", start);
      return nvar(manifold.time_index());
    }
    if ((name[0] == 'x' || name[0] == 'p') && name.size() > 1 &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int idx = std::stoi(name.substr(1));
      if (idx < 1 || idx > manifold.d())
        throw ParseError("variable index out of range for manifold dimension", start);
      return nvar(name[0] == 'x' ? idx - 1 : manifold.d() + idx - 1);
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

double eval_const_node(const NodePtr& n) {
  return eval_node(n.get(), std::span<const double>{});
}

// Syntactic periodicity: a circle coordinate may occur only inside sin/cos
// whose argument is affine in it with slope an integer multiple of 2*pi/P.
void check_periodic(const NodePtr& n, int coord, double period) {
  if (!((n->depmask >> coord) & 1u)) return;
  if (n->op == Op::Sin || n->op == Op::Cos) {
    NodePtr slope = simplify_node(diff_node(n->kids[0], coord));
    if (slope->depmask == 0) {
      double v = eval_const_node(slope);
      double ratio = v * period / (2.0 * std::numbers::pi);
      if (std::abs(ratio - std::round(ratio)) <= 1e-9) return;
    }
    throw ParseError("non-periodic dependence on circle coordinate (frequency not an "
                     "integer multiple of 2*pi/period)",
                     0);
  }
  if (n->op == Op::Var)
    throw ParseError("non-periodic dependence on circle coordinate", 0);
  for (const auto& k : n->kids) check_periodic(k, coord, period);
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr
// ---------------------------------------------------------------------------

Expr::Expr(ManifoldPtr manifold, NodePtr raw)
    : manifold_(std::move(manifold)), root_(simplify_node(raw)) {}

Expr Expr::parse(const std::string& source, ManifoldPtr manifold) {
  if (!manifold) throw InvalidArgument("null manifold");
  Parser p(source, *manifold);
  NodePtr raw = p.parse_expr();
  p.skip_ws();
  if (p.pos != source.size()) throw ParseError("trailing input", p.pos);
  for (int i = 0; i < manifold->dim(); ++i)
    if (manifold->is_circle(i)) check_periodic(raw, i, manifold->period(i));
  if (manifold->time() == TimeFactor::Circle)
    check_periodic(raw, manifold->time_index(), 1.0);
  return Expr(std::move(manifold), std::move(raw));
}

Expr Expr::constant(const Rational& r, ManifoldPtr manifold) {
  return Expr(std::move(manifold), nconst(r));
}

Expr Expr::variable(int index, ManifoldPtr manifold) {
  if (index < 0 || index >= manifold->var_count())
    throw InvalidArgument("variable index out of range");
  return Expr(std::move(manifold), nvar(index));
}

Expr Expr::pi(ManifoldPtr manifold) { return Expr(std::move(manifold), npi()); }

Expr Expr::diff(int index) const {
  if (index < 0 || index >= manifold_->var_count())
    throw InvalidArgument("derivative variable out of range");
  return Expr(manifold_, diff_node(root_, index));
}

Expr Expr::diff_t() const {
  if (!manifold_->has_time()) throw InvalidArgument("manifold has no time factor");
  return diff(manifold_->time_index());
}

double Expr::eval(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != manifold_->var_count())
    throw ManifoldError("point dimension does not match manifold");
  return eval_node(root_.get(), z);
}

namespace {
NodePtr subst(const NodePtr& n, int var, const NodePtr& repl,
              std::unordered_map<const Node*, NodePtr>& memo) {
  if (!((n->depmask >> var) & 1u)) return n;
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr r;
  if (n->op == Op::Var && n->var == var) {
    r = repl;
  } else {
    std::vector<NodePtr> kids;
    kids.reserve(n->kids.size());
    for (const auto& k : n->kids) kids.push_back(subst(k, var, repl, memo));
    r = make_node(n->op, n->value, n->var, n->expo, std::move(kids));
  }
  memo.emplace(n.get(), r);
  return r;
}
}  // namespace

Expr Expr::substitute(int index, const Rational& value) const {
  std::unordered_map<const Node*, NodePtr> memo;
  return Expr(manifold_, subst(root_, index, nconst(value), memo));
}

namespace {
void require_same_manifold(const Expr& a, const Expr& b) {
  if (!a.manifold() || !b.manifold() || *a.manifold() != *b.manifold())
    throw ManifoldError("expressions live on different manifolds");
}
}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  require_same_manifold(a, b);
  return Expr(a.manifold(), nbin(Op::Add, a.root(), b.root()));
}
Expr operator-(const Expr& a, const Expr& b) {
  require_same_manifold(a, b);
  return Expr(a.manifold(), nbin(Op::Sub, a.root(), b.root()));
}
Expr operator*(const Expr& a, const Expr& b) {
  require_same_manifold(a, b);
  return Expr(a.manifold(), nbin(Op::Mul, a.root(), b.root()));
}
Expr operator/(const Expr& a, const Expr& b) {
  require_same_manifold(a, b);
  return Expr(a.manifold(), nbin(Op::Div, a.root(), b.root()));
}
Expr operator-(const Expr& a) { return Expr(a.manifold(), nun(Op::Neg, a.root())); }

Expr Expr::pow(std::int64_t e) const { return Expr(manifold_, npow(root_, e)); }

Expr sin(const Expr& e) { return Expr(e.manifold(), nun(Op::Sin, e.root())); }
Expr cos(const Expr& e) { return Expr(e.manifold(), nun(Op::Cos, e.root())); }
Expr exp(const Expr& e) { return Expr(e.manifold(), nun(Op::Exp, e.root())); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Effective precedence of a printed node: 1 additive (or anything that prints
// with a leading minus), 2 multiplicative, 3 power, 4 atom.
int node_prec(const Node* n) {
  switch (n->op) {
    case Op::Add:
    case Op::Sub:
    case Op::Neg:
      return 1;
    case Op::Mul:
      if (n->kids[0]->op == Op::Const && n->kids[0]->value.negative()) return 1;
      return 2;
    case Op::Div:
      return 2;
    case Op::Pow:
      return 3;
    case Op::Const:
      if (n->value.negative()) return 1;
      if (!n->value.is_integer()) return 2;  // "3/4" parses at prec 2
      return 4;
    default:
      return 4;
  }
}

void print_node(const Node* n, const Manifold& m, std::string& out);

void print_child(const NodePtr& k, const Manifold& m, int min_prec, std::string& out) {
  if (node_prec(k.get()) < min_prec) {
    out += '(';
    print_node(k.get(), m, out);
    out += ')';
  } else {
    print_node(k.get(), m, out);
  }
}

void print_node(const Node* n, const Manifold& m, std::string& out) {
  switch (n->op) {
    case Op::Const:
      out += n->value.str();
      return;
    case Op::Pi:
      out += "pi";
      return;
    case Op::Var:
      out += m.var_name(n->var);
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
      out += n->op == Op::Sin ? "sin(" : (n->op == Op::Cos ? "cos(" : "exp(");
      print_node(n->kids[0].get(), m, out);
      out += ')';
      return;
    case Op::Pow:
      print_child(n->kids[0], m, 4, out);
      out += '^';
      out += std::to_string(n->expo);
      return;
    case Op::Mul: {
      std::size_t start = 0;
      if (n->kids[0]->op == Op::Const && n->kids[0]->value.negative()) {
        out += '-';
        Rational a = -n->kids[0]->value;
        if (!a.is_one() || n->kids.size() == 1) {
          if (!a.is_integer()) {
            out += '(';
            out += a.str();
            out += ')';
          } else {
            out += a.str();
          }
          if (n->kids.size() > 1) out += '*';
        }
        start = 1;
      }
      for (std::size_t i = start; i < n->kids.size(); ++i) {
        if (i > start) out += '*';
        print_child(n->kids[i], m, 2, out);
      }
      return;
    }
    case Op::Add: {
      bool first = true;
      for (const auto& k : n->kids) {
        std::string piece;
        print_child(k, m, 1, piece);
        if (first) {
          out += piece;
        } else if (!piece.empty() && piece[0] == '-') {
          out += " - ";
          out += piece.substr(1);
        } else {
          out += " + ";
          out += piece;
        }
        first = false;
      }
      return;
    }
    case Op::Neg:
      out += '-';
      print_child(n->kids[0], m, 2, out);
      return;
    case Op::Sub: {
      print_child(n->kids[0], m, 1, out);
      out += " - ";
      print_child(n->kids[1], m, 2, out);
      return;
    }
    case Op::Div:
      print_child(n->kids[0], m, 2, out);
      out += '/';
      print_child(n->kids[1], m, 3, out);
      return;
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_node(root_.get(), *manifold_, 0, out);
  return out;
}

}  // namespace hamreach
