#include "iplc/ast.hpp"

#include <array>

namespace iplc {

namespace {

constexpr std::array<std::string_view, 7> kIntensionalNames{"first", "next", "prev", "fby",
                                                            "wvr",   "asa",  "upon"};

bool sameList(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!sameExpr(a[i], b[i])) return false;
  }
  return true;
}

struct SameNode {
  const Expr::Node& other;

  bool operator()(const Literal& a) const {
    return canonicalCompare(a.value, std::get<Literal>(other).value) == 0;
  }
  bool operator()(const IdRef& a) const { return a.name == std::get<IdRef>(other).name; }
  bool operator()(const OpApply& a) const {
    const auto& b = std::get<OpApply>(other);
    return sameExpr(a.op, b.op) && sameList(a.args, b.args);
  }
  bool operator()(const FunCall& a) const {
    const auto& b = std::get<FunCall>(other);
    return sameExpr(a.fn, b.fn) && sameList(a.args, b.args);
  }
  bool operator()(const If& a) const {
    const auto& b = std::get<If>(other);
    return sameExpr(a.cond, b.cond) && sameExpr(a.then, b.then) &&
           sameExpr(a.otherwise, b.otherwise);
  }
  bool operator()(const TagQuery& a) const { return sameExpr(a.dim, std::get<TagQuery>(other).dim); }
  bool operator()(const HashNullary&) const { return true; }
  bool operator()(const At3& a) const {
    const auto& b = std::get<At3>(other);
    return sameExpr(a.body, b.body) && sameExpr(a.dim, b.dim) && sameExpr(a.tag, b.tag);
  }
  bool operator()(const AtCtx& a) const {
    const auto& b = std::get<AtCtx>(other);
    return sameExpr(a.body, b.body) && sameExpr(a.ctx, b.ctx);
  }
  bool operator()(const Where& a) const {
    const auto& b = std::get<Where>(other);
    if (!sameExpr(a.body, b.body) || a.decls.size() != b.decls.size()) return false;
    for (std::size_t i = 0; i < a.decls.size(); ++i) {
      if (!sameDecl(a.decls[i], b.decls[i])) return false;
    }
    return true;
  }
  bool operator()(const CtxBuild& a) const {
    const auto& b = std::get<CtxBuild>(other);
    if (a.bindings.size() != b.bindings.size()) return false;
    for (std::size_t i = 0; i < a.bindings.size(); ++i) {
      if (!sameExpr(a.bindings[i].first, b.bindings[i].first) ||
          !sameExpr(a.bindings[i].second, b.bindings[i].second)) {
        return false;
      }
    }
    return true;
  }
  bool operator()(const BoxExpr& a) const {
    const auto& b = std::get<BoxExpr>(other);
    if (a.dims.size() != b.dims.size() || !sameExpr(a.pred, b.pred)) return false;
    for (std::size_t i = 0; i < a.dims.size(); ++i) {
      if (!sameExpr(a.dims[i].dim, b.dims[i].dim) ||
          !sameDomain(a.dims[i].domain, b.dims[i].domain)) {
        return false;
      }
    }
    return true;
  }
  bool operator()(const SetExpr& a) const { return sameList(a.elems, std::get<SetExpr>(other).elems); }
  bool operator()(const TupleStream& a) const {
    const auto& b = std::get<TupleStream>(other);
    return sameExpr(a.dim, b.dim) && sameList(a.elems, b.elems);
  }
  bool operator()(const Select& a) const {
    const auto& b = std::get<Select>(other);
    return sameExpr(a.ctx, b.ctx) && sameExpr(a.stream, b.stream);
  }
  bool operator()(const Dot& a) const {
    const auto& b = std::get<Dot>(other);
    return sameExpr(a.ctx, b.ctx) && sameExpr(a.dim, b.dim);
  }
  bool operator()(const Intensional& a) const {
    const auto& b = std::get<Intensional>(other);
    return a.op == b.op && sameExpr(a.dim, b.dim) && sameList(a.args, b.args);
  }
};

}  // namespace

std::string_view intensionalName(IntensionalOp op) noexcept {
  return kIntensionalNames[static_cast<std::size_t>(op)];
}

std::optional<IntensionalOp> intensionalFromName(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kIntensionalNames.size(); ++i) {
    if (kIntensionalNames[i] == name) return static_cast<IntensionalOp>(i);
  }
  return std::nullopt;
}

bool sameExpr(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(SameNode{b.node}, a.node);
}

bool sameExpr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || sameExpr(*a, *b);
}

bool sameDomain(const std::optional<DomainExpr>& a, const std::optional<DomainExpr>& b) {
  if (!a || !b) return !a && !b;
  return a->form == b->form && sameList(a->items, b->items);
}

bool sameDecl(const Decl& a, const Decl& b) {
  return a.kind == b.kind && a.name == b.name && a.params == b.params && a.arity == b.arity &&
         sameExpr(a.body, b.body) && sameDomain(a.domain, b.domain);
}

const std::string* staticName(const ExprPtr& e) noexcept {
  if (!e) return nullptr;
  if (const auto* r = e->as<IdRef>()) return &r->name;
  return nullptr;
}

namespace ast {

ExprPtr make(Expr::Node node, SourcePos pos) {
  return std::make_shared<const Expr>(Expr{std::move(node), pos});
}
ExprPtr lit(Value v, SourcePos pos) { return make(Literal{std::move(v)}, pos); }
ExprPtr id(std::string name, SourcePos pos) { return make(IdRef{std::move(name)}, pos); }
ExprPtr op(const std::string& op, std::vector<ExprPtr> args, SourcePos pos) {
  return make(OpApply{id(op, pos), std::move(args)}, pos);
}
ExprPtr call(ExprPtr fn, std::vector<ExprPtr> args, SourcePos pos) {
  return make(FunCall{std::move(fn), std::move(args)}, pos);
}
ExprPtr ifThen(ExprPtr c, ExprPtr t, ExprPtr e, SourcePos pos) {
  return make(If{std::move(c), std::move(t), std::move(e)}, pos);
}
ExprPtr tagOf(ExprPtr dim, SourcePos pos) { return make(TagQuery{std::move(dim)}, pos); }
ExprPtr at3(ExprPtr body, ExprPtr dim, ExprPtr tag, SourcePos pos) {
  return make(At3{std::move(body), std::move(dim), std::move(tag)}, pos);
}
ExprPtr where(ExprPtr body, std::vector<Decl> decls, SourcePos pos) {
  return make(Where{std::move(body), std::move(decls)}, pos);
}

Decl dimDecl(std::string name, std::optional<DomainExpr> domain, SourcePos pos) {
  Decl d;
  d.kind = Decl::Kind::Dim;
  d.name = std::move(name);
  d.domain = std::move(domain);
  d.pos = pos;
  return d;
}
Decl varDecl(std::string name, ExprPtr body, SourcePos pos) {
  Decl d;
  d.kind = Decl::Kind::Var;
  d.name = std::move(name);
  d.body = std::move(body);
  d.pos = pos;
  return d;
}
Decl funDecl(std::string name, std::vector<std::string> params, ExprPtr body, SourcePos pos) {
  Decl d;
  d.kind = Decl::Kind::Fun;
  d.name = std::move(name);
  d.params = std::move(params);
  d.body = std::move(body);
  d.pos = pos;
  return d;
}
Decl procDecl(std::string name, std::size_t arity, SourcePos pos) {
  Decl d;
  d.kind = Decl::Kind::Proc;
  d.name = std::move(name);
  d.arity = arity;
  d.pos = pos;
  return d;
}

}  // namespace ast

namespace {

void visitDomain(const std::optional<DomainExpr>& dom,
                 const std::function<void(const ExprPtr&)>& fn) {
  if (!dom) return;
  for (const auto& item : dom->items) fn(item);
}

}  // namespace

void forEachChild(const Expr& e, const std::function<void(const ExprPtr&)>& fn) {
  auto each = [&](const std::vector<ExprPtr>& xs) {
    for (const auto& x : xs) fn(x);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, OpApply>) {
          fn(n.op);
          each(n.args);
        } else if constexpr (std::is_same_v<T, FunCall>) {
          fn(n.fn);
          each(n.args);
        } else if constexpr (std::is_same_v<T, If>) {
          fn(n.cond);
          fn(n.then);
          fn(n.otherwise);
        } else if constexpr (std::is_same_v<T, TagQuery>) {
          fn(n.dim);
        } else if constexpr (std::is_same_v<T, At3>) {
          fn(n.body);
          fn(n.dim);
          fn(n.tag);
        } else if constexpr (std::is_same_v<T, AtCtx>) {
          fn(n.body);
          fn(n.ctx);
        } else if constexpr (std::is_same_v<T, Where>) {
          fn(n.body);
          for (const auto& d : n.decls) {
            if (d.body) fn(d.body);
            visitDomain(d.domain, fn);
          }
        } else if constexpr (std::is_same_v<T, CtxBuild>) {
          for (const auto& [d, t] : n.bindings) {
            fn(d);
            fn(t);
          }
        } else if constexpr (std::is_same_v<T, BoxExpr>) {
          for (const auto& bd : n.dims) {
            fn(bd.dim);
            visitDomain(bd.domain, fn);
          }
          if (n.pred) fn(n.pred);
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          each(n.elems);
        } else if constexpr (std::is_same_v<T, TupleStream>) {
          each(n.elems);
          fn(n.dim);
        } else if constexpr (std::is_same_v<T, Select>) {
          fn(n.ctx);
          fn(n.stream);
        } else if constexpr (std::is_same_v<T, Dot>) {
          fn(n.ctx);
          fn(n.dim);
        } else if constexpr (std::is_same_v<T, Intensional>) {
          fn(n.dim);
          each(n.args);
        }
      },
      e.node);
}

void forEachNode(const ExprPtr& e, const std::function<void(const Expr&)>& fn) {
  if (!e) return;
  fn(*e);
  forEachChild(*e, [&](const ExprPtr& c) { forEachNode(c, fn); });
}

}  // namespace iplc

namespace iplc {

namespace {

std::optional<DomainExpr> mapDomain(const std::optional<DomainExpr>& dom,
                                    const std::function<ExprPtr(const ExprPtr&)>& fn) {
  if (!dom) return std::nullopt;
  DomainExpr out{dom->form, {}};
  for (const auto& item : dom->items) out.items.push_back(fn(item));
  return out;
}

}  // namespace

ExprPtr mapChildren(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn) {
  auto each = [&](const std::vector<ExprPtr>& xs) {
    std::vector<ExprPtr> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(fn(x));
    return out;
  };
  auto opt = [&](const ExprPtr& x) { return x ? fn(x) : nullptr; };
  Expr::Node node = std::visit(
      [&](const auto& n) -> Expr::Node {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, OpApply>) {
          return OpApply{fn(n.op), each(n.args)};
        } else if constexpr (std::is_same_v<T, FunCall>) {
          return FunCall{fn(n.fn), each(n.args)};
        } else if constexpr (std::is_same_v<T, If>) {
          return If{fn(n.cond), fn(n.then), fn(n.otherwise)};
        } else if constexpr (std::is_same_v<T, TagQuery>) {
          return TagQuery{fn(n.dim)};
        } else if constexpr (std::is_same_v<T, At3>) {
          return At3{fn(n.body), fn(n.dim), fn(n.tag)};
        } else if constexpr (std::is_same_v<T, AtCtx>) {
          return AtCtx{fn(n.body), fn(n.ctx)};
        } else if constexpr (std::is_same_v<T, Where>) {
          Where w{fn(n.body), n.decls};
          for (auto& d : w.decls) {
            d.body = opt(d.body);
            d.domain = mapDomain(d.domain, fn);
          }
          return w;
        } else if constexpr (std::is_same_v<T, CtxBuild>) {
          CtxBuild c;
          for (const auto& [d, t] : n.bindings) c.bindings.emplace_back(fn(d), fn(t));
          return c;
        } else if constexpr (std::is_same_v<T, BoxExpr>) {
          BoxExpr b;
          for (const auto& bd : n.dims) b.dims.push_back({fn(bd.dim), mapDomain(bd.domain, fn)});
          b.pred = opt(n.pred);
          return b;
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          return SetExpr{each(n.elems)};
        } else if constexpr (std::is_same_v<T, TupleStream>) {
          return TupleStream{each(n.elems), fn(n.dim)};
        } else if constexpr (std::is_same_v<T, Select>) {
          return Select{fn(n.ctx), fn(n.stream)};
        } else if constexpr (std::is_same_v<T, Dot>) {
          return Dot{fn(n.ctx), fn(n.dim)};
        } else if constexpr (std::is_same_v<T, Intensional>) {
          return Intensional{n.op, fn(n.dim), each(n.args)};
        } else {
          return n;
        }
      },
      e->node);
  return ast::make(std::move(node), e->pos);
}

}  // namespace iplc
