#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "expr.hpp"

namespace hamreach {

// Straight-line evaluator compiled from one or more expression trees with
// structural subexpression sharing. Evaluation order is fixed at compile
// time, so results are bit-identical across calls. Non-finite intermediates
// (division by zero etc.) propagate as NaN/Inf; callers check the outputs.
class CompiledExprs {
 public:
  CompiledExprs() = default;

  static CompiledExprs compile(std::span<const Expr> roots);
  static CompiledExprs compile(const std::vector<NodePtr>& roots, int var_count);

  int output_count() const { return static_cast<int>(outputs_.size()); }
  int var_count() const { return n_vars_; }

  // `scratch` is caller-owned working memory so distinct threads can share
  // one compiled tape.
  void eval(std::span<const double> z, std::span<double> out,
            std::vector<double>& scratch) const;

 private:
  enum class OpCode : std::uint8_t { Const, Pi, Var, Sin, Cos, Exp, Neg, Add, Sub, Mul, Div, Powi };
  struct Ins {
    OpCode op;
    std::int32_t dst = 0;
    std::int32_t a = 0;
    std::int32_t b = 0;
    double imm = 0.0;
    std::int64_t expo = 0;
  };
  std::vector<Ins> code_;
  std::vector<std::int32_t> outputs_;
  std::int32_t n_slots_ = 0;
  int n_vars_ = 0;
};

}  // namespace hamreach
