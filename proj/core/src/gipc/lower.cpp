#include "iplc/compiler.hpp"

namespace iplc {

namespace {

class Lowering {
 public:
  explicit Lowering(std::set<std::string>& reserved) : reserved_(reserved) {}

  ExprPtr run(const ExprPtr& e) {
    if (!e) return e;
    ExprPtr mapped = mapChildren(e, [&](const ExprPtr& c) { return run(c); });
    const auto* in = mapped->as<Intensional>();
    if (!in) return mapped;
    // Children are already lowered; the templates below only introduce new
    // intensional nodes around them, so one more pass finishes the job.
    return run(rewrite(*in, mapped->pos));
  }

 private:
  std::string fresh(const std::string& base) {
    for (int k = 1;; ++k) {
      std::string candidate = base + "__" + std::to_string(k);
      if (reserved_.insert(candidate).second) return candidate;
    }
  }

  ExprPtr rewrite(const Intensional& in, SourcePos pos) {
    const ExprPtr& d = in.dim;
    auto tag = [&] { return ast::tagOf(d, pos); };
    auto shifted = [&](const char* op) { return ast::op(op, {tag(), ast::lit(Value{1}, pos)}, pos); };
    auto intens = [&](IntensionalOp op, std::vector<ExprPtr> args) {
      return ast::make(Intensional{op, d, std::move(args)}, pos);
    };
    switch (in.op) {
      case IntensionalOp::First:
        return ast::at3(in.args[0], d, ast::lit(Value{0}, pos), pos);
      case IntensionalOp::Next:
        return ast::at3(in.args[0], d, shifted("add"), pos);
      case IntensionalOp::Prev:
        return ast::at3(in.args[0], d, shifted("sub"), pos);
      case IntensionalOp::Fby:
        return ast::ifThen(ast::op("le", {tag(), ast::lit(Value{0}, pos)}, pos), in.args[0],
                           ast::at3(in.args[1], d, shifted("sub"), pos), pos);
      case IntensionalOp::Wvr: {
        // X wvr Y = X @ T where T = U fby (U @ (T+1)); U = if Y then #d else next U; end
        std::string t = fresh("wvr"), u = fresh("wvr");
        ExprPtr T = ast::id(t, pos), U = ast::id(u, pos);
        ExprPtr tDef = intens(IntensionalOp::Fby,
                              {U, ast::at3(U, d, ast::op("add", {T, ast::lit(Value{1}, pos)}, pos), pos)});
        ExprPtr uDef = ast::ifThen(in.args[1], tag(), intens(IntensionalOp::Next, {U}), pos);
        return ast::where(ast::at3(in.args[0], d, T, pos),
                          {ast::varDecl(t, tDef, pos), ast::varDecl(u, uDef, pos)}, pos);
      }
      case IntensionalOp::Asa:
        return intens(IntensionalOp::First, {intens(IntensionalOp::Wvr, in.args)});
      case IntensionalOp::Upon: {
        // X upon Y = X @ W where W = 0 fby (if Y then W+1 else W); end
        std::string w = fresh("upon");
        ExprPtr W = ast::id(w, pos);
        ExprPtr step = ast::ifThen(in.args[1], ast::op("add", {W, ast::lit(Value{1}, pos)}, pos), W, pos);
        ExprPtr wDef = intens(IntensionalOp::Fby, {ast::lit(Value{0}, pos), step});
        return ast::where(ast::at3(in.args[0], d, W, pos), {ast::varDecl(w, wDef, pos)}, pos);
      }
    }
    throw Error(ErrorCode::ParseError, "unknown intensional operator");
  }

  std::set<std::string>& reserved_;
};

}  // namespace

ExprPtr lower(const ExprPtr& e, std::set<std::string>& reserved) {
  forEachNode(e, [&](const Expr& n) {
    if (const auto* r = n.as<IdRef>()) reserved.insert(r->name);
    if (const auto* w = n.as<Where>()) {
      for (const auto& d : w->decls) {
        reserved.insert(d.name);
        reserved.insert(d.params.begin(), d.params.end());
      }
    }
  });
  return Lowering(reserved).run(e);
}

ExprPtr lower(const ExprPtr& e) {
  std::set<std::string> reserved;
  return lower(e, reserved);
}

}  // namespace iplc
