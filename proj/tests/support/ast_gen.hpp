#pragma once

// Random well-scoped expressions over a small fixed vocabulary:
// dimensions t and s, variables x and y, function f(a).

#include "generators.hpp"
#include "iplc/ast.hpp"

namespace iplc::testing {

class AstGen {
 public:
  explicit AstGen(Rng& rng, bool surface = true) : rng_(rng), surface_(surface) {}

  ExprPtr expr(int depth) {
    using namespace ast;
    if (depth <= 0) return leaf();
    auto sub = [&] { return expr(depth - 1); };
    switch (uniformInt(rng_, 0, surface_ ? 17 : 15)) {
      case 0: return leaf();
      case 1: return op(pick({"add", "sub", "mul", "lt", "eq", "and"}), {sub(), sub()});
      case 2: return op(pick({"neg", "not"}), {sub()});
      case 3: return ifThen(sub(), sub(), sub());
      case 4: return tagOf(dim());
      case 5: return make(HashNullary{});
      case 6: return at3(sub(), dim(), sub());
      case 7: return make(AtCtx{sub(), ctx(depth - 1)});
      case 8: return call(id("f"), {sub()});
      case 9: return ctx(depth - 1);
      case 10: {
        BoxExpr b;
        b.dims.push_back({dim(), DomainExpr{DomainExpr::Form::Range, {lit(0), lit(2)}}});
        if (uniformInt(rng_, 0, 1)) b.pred = sub();
        return make(std::move(b));
      }
      case 11: return make(SetExpr{{ctx(depth - 1), ctx(depth - 1)}});
      case 12: return make(TupleStream{{sub(), sub(), sub()}, dim()});
      case 13: return make(Select{ctx(depth - 1), sub()});
      case 14: return make(Dot{ctx(depth - 1), dim()});
      case 15: {
        std::string local = "w" + std::to_string(counter_++);
        return where(op("add", {id(local), sub()}), {varDecl(local, sub())});
      }
      case 16: return make(Intensional{pick({IntensionalOp::First, IntensionalOp::Next}), dim(), {sub()}});
      default:
        return make(Intensional{pick({IntensionalOp::Fby, IntensionalOp::Wvr, IntensionalOp::Upon,
                                      IntensionalOp::Asa}),
                                dim(),
                                {sub(), sub()}});
    }
  }

  ExprPtr leaf() {
    using namespace ast;
    switch (uniformInt(rng_, 0, 6)) {
      case 0: return lit(uniformInt(rng_, -5, 9));
      case 1: return lit(static_cast<double>(uniformInt(rng_, -8, 8)) / 4.0);
      case 2: return lit(uniformInt(rng_, 0, 1) == 1);
      case 3: return lit(std::string(uniformInt(rng_, 0, 1) ? "a b" : "q\"\n"));
      case 4: return lit(Eod{});
      default: return id(pick({"x", "y", "t", "s"}));
    }
  }

 private:
  ExprPtr dim() { return ast::id(pick({"t", "s"})); }

  ExprPtr ctx(int depth) {
    CtxBuild c;
    c.bindings.emplace_back(dim(), depth > 0 ? expr(depth - 1) : leaf());
    return ast::make(std::move(c));
  }

  template <typename T>
  T pick(std::initializer_list<T> xs) {
    auto i = uniformInt(rng_, 0, static_cast<std::int64_t>(xs.size()) - 1);
    return *(xs.begin() + i);
  }
  std::string pick(std::initializer_list<const char*> xs) { return pick<const char*>(xs); }

  Rng& rng_;
  bool surface_;
  int counter_ = 0;
};

}  // namespace iplc::testing
