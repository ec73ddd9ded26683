#include "interpreter.hpp"

#include <array>

#include "iplc/builtins.hpp"
#include "iplc/error.hpp"

namespace iplc::detail {

namespace {

class DepthGuard {
 public:
  DepthGuard(std::size_t& depth, std::size_t max) : depth_(depth) {
    if (++depth_ > max) {
      --depth_;
      throw Error(ErrorCode::DepthExceeded,
                  "evaluation nested deeper than " + std::to_string(max) + " steps");
    }
  }
  ~DepthGuard() { --depth_; }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;

 private:
  std::size_t& depth_;
};

[[noreturn]] void typeError(const std::string& what, const Value& v) {
  throw Error(ErrorCode::TypeError,
              what + ", got " + std::string(kindName(v.kind())) + " " + v.text());
}

std::int64_t intTag(const Context& point, const DimensionName& d) {
  const Tag* t = point.find(d);
  if (!t) throw Error(ErrorCode::UnboundDimension, "dimension '" + d.str() + "' has no tag here");
  if (!t->isInt()) {
    throw Error(ErrorCode::TypeError, "stream navigation along '" + d.str() + "' needs an integer tag, got " +
                                          t->text());
  }
  return t->asInt();
}

}  // namespace

const Frame::Binding* Frame::find(std::string_view name) const {
  for (const Frame* f = this; f; f = f->parent) {
    if (auto it = f->names.find(name); it != f->names.end()) return &it->second;
  }
  return nullptr;
}

Value Interpreter::eval(const ExprPtr& e, const Context& point, const Frame* frame) {
  DepthGuard guard(depth_, limits_.maxDepth);
  return node(*e, point, frame);
}

DimensionName Interpreter::dimension(const ExprPtr& e, const Context& point, const Frame* frame) {
  Value v = eval(e, point, frame);
  if (!v.isDim()) {
    throw Error(ErrorCode::NonDimensionAt, "expected a dimension, got " + std::string(kindName(v.kind())) +
                                               " " + v.text());
  }
  return DimensionName{v.asDim().name};
}

bool Interpreter::truth(const ExprPtr& e, const Context& point, const Frame* frame) {
  Value v = eval(e, point, frame);
  if (!v.isBool()) {
    throw Error(ErrorCode::NotABoolean,
                "condition is " + std::string(kindName(v.kind())) + " " + v.text() + ", not a boolean");
  }
  return v.asBool();
}

TagDomain Interpreter::domain(const DimensionName& d, const DomainExpr& dom, const Context& point,
                              const Frame* frame) {
  if (dom.form == DomainExpr::Form::Range) {
    Value lo = eval(dom.items.at(0), point, frame), hi = eval(dom.items.at(1), point, frame);
    if (!lo.isInt()) typeError("a range bound must be an integer", lo);
    if (!hi.isInt()) typeError("a range bound must be an integer", hi);
    if (hi.asInt() - lo.asInt() > 1'000'000) {
      throw Error(ErrorCode::TypeError, "domain of '" + d.str() + "' is too large to enumerate");
    }
    return TagDomain::range(d, lo.asInt(), hi.asInt());
  }
  std::vector<Tag> tags;
  for (const auto& item : dom.items) tags.push_back(eval(item, point, frame).toTag());
  return TagDomain(d, std::move(tags));
}

Value Interpreter::identifier(const std::string& name, const Context& point, const Frame* frame) {
  if (frame) {
    if (const Frame::Binding* b = frame->find(name)) {
      switch (b->kind) {
        case Frame::Binding::Kind::Param: return eval(b->expr, point, b->env);
        case Frame::Binding::Kind::Var:
          mark(Rule::Vid);
          return eval(b->expr, point, b->env);
        case Frame::Binding::Kind::Fun:
          throw Error(ErrorCode::TypeError, "local function '" + name + "' cannot be used as a value");
      }
    }
  }
  if (const GeerEntry* entry = g_.find(name)) {
    switch (entry->kind) {
      case EntryKind::Const:
        mark(Rule::Cid);
        return entry->ast->as<Literal>()->value;
      case EntryKind::Dim:
        mark(Rule::Did);
        return DimRef{name};
      case EntryKind::Func:
      case EntryKind::Proc:
        mark(Rule::Fid);
        return FunRef{name};
      case EntryKind::Op:
        mark(Rule::Opid);
        return OpRef{name};
      case EntryKind::Var:
        mark(Rule::Vid);
        return variable(name, *entry, point);
    }
  }
  if (findBuiltin(name)) {
    mark(Rule::Opid);
    return OpRef{name};
  }
  throw Error(ErrorCode::UnresolvedIdentifier, "unresolved identifier '" + name + "'");
}

Value Interpreter::callFunction(const std::vector<std::string>& params, const ExprPtr& body,
                                const Frame* closure, const std::vector<ExprPtr>& args,
                                const Context& point, const Frame* frame) {
  if (params.size() != args.size()) {
    throw Error(ErrorCode::ArityMismatch, "function of " + std::to_string(params.size()) +
                                              " parameters called with " + std::to_string(args.size()));
  }
  mark(Rule::Fct);
  // Non-strict: each parameter is the unevaluated actual, closed over the
  // caller's scope and evaluated wherever the body uses it.
  Frame f{closure, {}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    f.names.insert_or_assign(params[i], Frame::Binding{Frame::Binding::Kind::Param, args[i], nullptr, frame});
  }
  return eval(body, point, &f);
}

Value Interpreter::apply(const Value& callee, const std::vector<ExprPtr>& args, const Context& point,
                         const Frame* frame) {
  auto strict = [&] {
    std::vector<Value> vs;
    vs.reserve(args.size());
    for (const auto& a : args) vs.push_back(eval(a, point, frame));
    return vs;
  };
  if (callee.isOp()) {
    mark(Rule::Op);
    const std::string& name = callee.asOp().name;
    const BuiltinOp* op = findBuiltin(name);
    if (op && op->family == OpFamily::Context) mark(Rule::ContextOp);
    if (op && op->family == OpFamily::Set) mark(Rule::SetOp);
    auto vs = strict();
    return applyBuiltin(name, vs);
  }
  if (callee.isFun()) {
    const std::string& name = callee.asFun().name;
    const GeerEntry* entry = g_.find(name);
    if (entry && entry->kind == EntryKind::Func) {
      return callFunction(entry->params, entry->ast, nullptr, args, point, frame);
    }
    if (entry && entry->kind == EntryKind::Proc) {
      if (args.size() != entry->arity) {
        throw Error(ErrorCode::ArityMismatch, "procedure '" + name + "' takes " +
                                                  std::to_string(entry->arity) + " arguments, got " +
                                                  std::to_string(args.size()));
      }
      mark(Rule::Fct);
      return procedure(name, strict());
    }
    throw Error(ErrorCode::UnresolvedIdentifier, "no function '" + name + "'");
  }
  typeError("only functions and operators can be applied", callee);
}

Value Interpreter::intensional(const Intensional& n, const Context& point, const Frame* frame) {
  // Tag arithmetic goes through the ordinary operators so that a direct
  // reading agrees with the lowered `@`/`#` form on every tag, errors
  // included.
  DimensionName d = dimension(n.dim, point, frame);
  if (n.op == IntensionalOp::First) return eval(n.args[0], point.with(d, Tag{0}), frame);
  const Tag* current = point.find(d);
  if (!current) throw Error(ErrorCode::UnboundDimension, "dimension '" + d.str() + "' has no tag here");
  Value t = Value::fromTag(*current);
  const Value one{std::int64_t{1}}, zero{std::int64_t{0}};
  auto plus = [&](const Value& v) { return applyBuiltin("add", std::array{v, one}); };
  auto minus = [&](const Value& v) { return applyBuiltin("sub", std::array{v, one}); };
  auto positive = [&](const Value& v) { return !applyBuiltin("le", std::array{v, zero}).asBool(); };
  auto at = [&](const ExprPtr& e, const Value& tag) { return eval(e, point.with(d, tag.toTag()), frame); };
  auto holds = [&](const Value& tag) { return truth(n.args[1], point.with(d, tag.toTag()), frame); };
  std::int64_t budget = limits_.maxScan;
  auto spend = [&] {
    if (--budget < 0) {
      throw Error(ErrorCode::DepthExceeded, "stream search along '" + d.str() + "' gave up after " +
                                                std::to_string(limits_.maxScan) + " steps");
    }
  };
  // First tag at or after `from`, stepping by one, where the condition holds.
  auto seek = [&](Value from) {
    for (;; from = plus(from)) {
      spend();
      if (holds(from)) return from;
    }
  };
  switch (n.op) {
    case IntensionalOp::First: break;
    case IntensionalOp::Next: return at(n.args[0], plus(t));
    case IntensionalOp::Prev: return at(n.args[0], minus(t));
    case IntensionalOp::Fby: return positive(t) ? at(n.args[1], minus(t)) : eval(n.args[0], point, frame);
    case IntensionalOp::Asa: return at(n.args[0], seek(zero));
    case IntensionalOp::Wvr: {
      // Step t back to its base b <= 0; the answer is then the k-th tag
      // after the first one found from b where the condition holds.
      std::int64_t k = 0;
      Value base = t;
      for (; positive(base); ++k) {
        spend();
        base = minus(base);
      }
      Value j = seek(base);
      for (std::int64_t i = 0; i < k; ++i) j = seek(plus(j));
      return at(n.args[0], j);
    }
    case IntensionalOp::Upon: {
      // How often the condition held at the tags t-1, t-2, ... above 0.
      std::int64_t count = 0;
      for (Value j = t; positive(j);) {
        spend();
        j = minus(j);
        count += holds(j) ? 1 : 0;
      }
      return at(n.args[0], Value(count));
    }
  }
  throw Error(ErrorCode::TypeError, "unknown stream operator");
}

Value Interpreter::node(const Expr& e, const Context& point, const Frame* frame) {
  if (const auto* n = e.as<Literal>()) {
    mark(Rule::Cid);
    return n->value;
  }
  if (const auto* n = e.as<IdRef>()) return identifier(n->name, point, frame);
  if (const auto* n = e.as<OpApply>()) return apply(eval(n->op, point, frame), n->args, point, frame);
  if (const auto* n = e.as<FunCall>()) {
    if (const std::string* name = staticName(n->fn); name && frame) {
      const Frame::Binding* b = frame->find(*name);
      if (b && b->kind == Frame::Binding::Kind::Fun) {
        return callFunction(b->decl->params, b->decl->body, b->env, n->args, point, frame);
      }
    }
    return apply(eval(n->fn, point, frame), n->args, point, frame);
  }
  if (const auto* n = e.as<If>()) {
    if (truth(n->cond, point, frame)) {
      mark(Rule::CondTrue);
      return eval(n->then, point, frame);
    }
    mark(Rule::CondFalse);
    return eval(n->otherwise, point, frame);
  }
  if (const auto* n = e.as<TagQuery>()) {
    mark(Rule::Tag);
    DimensionName d = dimension(n->dim, point, frame);
    const Tag* t = point.find(d);
    if (!t) throw Error(ErrorCode::UnboundDimension, "dimension '" + d.str() + "' has no tag here");
    return Value::fromTag(*t);
  }
  if (e.is<HashNullary>()) {
    mark(Rule::Hash);
    return project(point, g_.dimensions());
  }
  if (const auto* n = e.as<At3>()) {
    mark(Rule::At);
    DimensionName d = dimension(n->dim, point, frame);
    Tag t = eval(n->tag, point, frame).toTag();
    return eval(n->body, point.with(d, std::move(t)), frame);
  }
  if (const auto* n = e.as<AtCtx>()) {
    Value c = eval(n->ctx, point, frame);
    if (c.isCtx()) {
      mark(Rule::AtContext);
      return eval(n->body, override(point, c.asCtx()), frame);
    }
    if (c.isCtxSet()) {
      mark(Rule::AtSet);
      std::vector<Value> out;
      for (const auto& elem : c.asCtxSet().elements()) out.push_back(eval(n->body, override(point, elem), frame));
      return ValueSet(std::move(out));
    }
    typeError("'@' needs a dimension and tag, a context or a context set", c);
  }
  if (const auto* n = e.as<Where>()) {
    mark(Rule::Where);
    Frame f{frame, {}};
    Context inner = point;
    for (const auto& d : n->decls) {
      switch (d.kind) {
        case Decl::Kind::Dim:
          mark(Rule::QDim);
          inner = inner.with(DimensionName{d.name}, Tag{0});
          break;
        case Decl::Kind::Var:
          mark(Rule::QId);
          f.names.insert_or_assign(d.name, Frame::Binding{Frame::Binding::Kind::Var, d.body, nullptr, &f});
          break;
        case Decl::Kind::Fun:
          mark(Rule::QId);
          f.names.insert_or_assign(d.name, Frame::Binding{Frame::Binding::Kind::Fun, nullptr, &d, &f});
          break;
        case Decl::Kind::Proc: break;
      }
    }
    if (n->decls.size() >= 2) mark(Rule::QQ);
    return eval(n->body, inner, &f);
  }
  if (const auto* n = e.as<CtxBuild>()) {
    mark(Rule::Context);
    Context::Bindings b;
    for (const auto& [dim, tag] : n->bindings) {
      DimensionName d = dimension(dim, point, frame);
      Tag t = eval(tag, point, frame).toTag();
      auto [it, fresh] = b.emplace(d, t);
      if (!fresh && !(it->second == t)) {
        throw Error(ErrorCode::ConflictingTags, "dimension '" + d.str() + "' bound twice in one context");
      }
    }
    return Context{std::move(b)};
  }
  if (const auto* n = e.as<BoxExpr>()) {
    mark(Rule::Box);
    std::vector<TagDomain> doms;
    for (const auto& bd : n->dims) {
      DimensionName d = dimension(bd.dim, point, frame);
      if (bd.domain) {
        doms.push_back(domain(d, *bd.domain, point, frame));
      } else if (auto declared = declaredDomain(g_, d)) {
        doms.push_back(std::move(*declared));
      } else {
        throw Error(ErrorCode::TypeError, "Box dimension '" + d.str() + "' has no finite domain");
      }
    }
    return box(doms, [&](const Context& c) { return !n->pred || truth(n->pred, override(point, c), frame); });
  }
  if (const auto* n = e.as<SetExpr>()) {
    mark(Rule::Set);
    ContextSet s;
    for (const auto& elem : n->elems) {
      Value v = eval(elem, point, frame);
      if (!v.isCtx()) typeError("a context set holds contexts", v);
      s.insert(v.asCtx());
    }
    return s;
  }
  if (const auto* n = e.as<TupleStream>()) {
    mark(Rule::Tuple);
    // <e1,...,en> d behaves as e1 fby.d e2 fby.d ... fby.d eod: element i
    // sits at tag i and is itself evaluated with d at 0.
    DimensionName d = dimension(n->dim, point, frame);
    std::int64_t i = intTag(point, d);
    if (i >= static_cast<std::int64_t>(n->elems.size())) return Eod{};
    return eval(n->elems[static_cast<std::size_t>(std::max<std::int64_t>(i, 0))], point.with(d, Tag{0}), frame);
  }
  if (const auto* n = e.as<Select>()) {
    mark(Rule::Select);
    Value c = eval(n->ctx, point, frame);
    if (!c.isCtx()) typeError("select needs a context", c);
    return eval(n->stream, override(point, c.asCtx()), frame);
  }
  if (const auto* n = e.as<Dot>()) {
    mark(Rule::Dot);
    Value c = eval(n->ctx, point, frame);
    if (!c.isCtx()) typeError("'.' needs a context on its left", c);
    return Value::fromTag(lookup(c.asCtx(), dimension(n->dim, point, frame)));
  }
  if (const auto* n = e.as<Intensional>()) return intensional(*n, point, frame);
  throw Error(ErrorCode::TypeError, "unknown expression node");
}

}  // namespace iplc::detail
