#include "compiled.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace hamreach {

CompiledExprs CompiledExprs::compile(std::span<const Expr> roots) {
  std::vector<NodePtr> nodes;
  nodes.reserve(roots.size());
  int vc = 0;
  for (const auto& e : roots) {
    nodes.push_back(e.root());
    vc = std::max(vc, e.manifold()->var_count());
  }
  return compile(nodes, vc);
}

CompiledExprs CompiledExprs::compile(const std::vector<NodePtr>& roots, int var_count) {
  CompiledExprs c;
  c.n_vars_ = var_count;
  std::unordered_map<std::size_t, std::vector<std::pair<NodePtr, std::int32_t>>> memo;

  // Post-order emit with structural dedup.
  auto emit = [&](auto&& self, const NodePtr& n) -> std::int32_t {
    auto& bucket = memo[n->hash];
    for (const auto& [seen, slot] : bucket)
      if (node_eq(seen, n)) return slot;

    Ins ins;
    switch (n->op) {
      case Op::Const:
        ins.op = OpCode::Const;
        ins.imm = n->value.to_double();
        break;
      case Op::Pi:
        ins.op = OpCode::Pi;
        break;
      case Op::Var:
        ins.op = OpCode::Var;
        ins.a = n->var;
        break;
      case Op::Sin:
      case Op::Cos:
      case Op::Exp:
      case Op::Neg: {
        ins.op = n->op == Op::Sin   ? OpCode::Sin
                 : n->op == Op::Cos ? OpCode::Cos
                 : n->op == Op::Exp ? OpCode::Exp
                                    : OpCode::Neg;
        ins.a = self(self, n->kids[0]);
        break;
      }
      case Op::Pow:
        ins.op = OpCode::Powi;
        ins.a = self(self, n->kids[0]);
        ins.expo = n->expo;
        break;
      case Op::Sub:
      case Op::Div: {
        ins.op = n->op == Op::Sub ? OpCode::Sub : OpCode::Div;
        ins.a = self(self, n->kids[0]);
        ins.b = self(self, n->kids[1]);
        break;
      }
      case Op::Add:
      case Op::Mul: {
        // Left fold in child order.
        OpCode oc = n->op == Op::Add ? OpCode::Add : OpCode::Mul;
        std::int32_t acc = self(self, n->kids[0]);
        for (std::size_t i = 1; i < n->kids.size(); ++i) {
          std::int32_t rhs = self(self, n->kids[i]);
          Ins step;
          step.op = oc;
          step.a = acc;
          step.b = rhs;
          step.dst = c.n_slots_++;
          c.code_.push_back(step);
          acc = step.dst;
        }
        bucket.emplace_back(n, acc);
        return acc;
      }
    }
    ins.dst = c.n_slots_++;
    c.code_.push_back(ins);
    bucket.emplace_back(n, ins.dst);
    return ins.dst;
  };

  for (const auto& r : roots) c.outputs_.push_back(emit(emit, r));
  return c;
}

void CompiledExprs::eval(std::span<const double> z, std::span<double> out,
                         std::vector<double>& scratch) const {
  if (scratch.size() < static_cast<std::size_t>(n_slots_)) scratch.resize(n_slots_);
  double* s = scratch.data();
  for (const Ins& ins : code_) {
    switch (ins.op) {
      case OpCode::Const:
        s[ins.dst] = ins.imm;
        break;
      case OpCode::Pi:
        s[ins.dst] = std::numbers::pi;
        break;
      case OpCode::Var:
        s[ins.dst] = ins.a < static_cast<std::int32_t>(z.size()) ? z[ins.a]
                                                                 : std::nan("");
        break;
      case OpCode::Sin:
        s[ins.dst] = std::sin(s[ins.a]);
        break;
      case OpCode::Cos:
        s[ins.dst] = std::cos(s[ins.a]);
        break;
      case OpCode::Exp:
        s[ins.dst] = std::exp(s[ins.a]);
        break;
      case OpCode::Neg:
        s[ins.dst] = -s[ins.a];
        break;
      case OpCode::Add:
        s[ins.dst] = s[ins.a] + s[ins.b];
        break;
      case OpCode::Sub:
        s[ins.dst] = s[ins.a] - s[ins.b];
        break;
      case OpCode::Mul:
        s[ins.dst] = s[ins.a] * s[ins.b];
        break;
      case OpCode::Div:
        s[ins.dst] = s[ins.a] / s[ins.b];
        break;
      case OpCode::Powi: {
        double base = s[ins.a];
        std::int64_t e = ins.expo;
        bool inv = e < 0;
        std::uint64_t k = inv ? static_cast<std::uint64_t>(-e) : static_cast<std::uint64_t>(e);
        double acc = 1.0, b = base;
        while (k > 0) {
          if (k & 1) acc *= b;
          k >>= 1;
          if (k) b *= b;
        }
        s[ins.dst] = inv ? 1.0 / acc : acc;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < outputs_.size() && i < out.size(); ++i)
    out[i] = s[outputs_[i]];
}

}  // namespace hamreach
