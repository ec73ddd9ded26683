#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iplc/value.hpp"

namespace iplc {

struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Finite tag domain written at a Box site or a dimension declaration:
/// either `lo..hi` (items = {lo, hi}) or `{e1, e2, ...}`.
struct DomainExpr {
  enum class Form : std::uint8_t { Range, List };
  Form form = Form::Range;
  std::vector<ExprPtr> items;
};

struct Decl {
  enum class Kind : std::uint8_t { Dim, Var, Fun, Proc };
  Kind kind = Kind::Var;
  std::string name;
  std::vector<std::string> params;  // Fun
  ExprPtr body;                     // Var, Fun
  std::optional<DomainExpr> domain; // Dim
  std::size_t arity = 0;            // Proc
  SourcePos pos;
};

struct Literal {
  Value value;
};
struct IdRef {
  std::string name;
};
/// Strict application of a built-in operator; `op` is normally an IdRef.
struct OpApply {
  ExprPtr op;
  std::vector<ExprPtr> args;
};
/// `f(args)`: dispatched on what `fn` evaluates to.
struct FunCall {
  ExprPtr fn;
  std::vector<ExprPtr> args;
};
struct If {
  ExprPtr cond, then, otherwise;
};
/// `#E`
struct TagQuery {
  ExprPtr dim;
};
/// bare `#`
struct HashNullary {};
/// `E @ d v`
struct At3 {
  ExprPtr body, dim, tag;
};
/// `E @ C` where C is a context or a context set.
struct AtCtx {
  ExprPtr body, ctx;
};
struct Where {
  ExprPtr body;
  std::vector<Decl> decls;
};
/// `[d1:e1, d2:e2]`
struct CtxBuild {
  std::vector<std::pair<ExprPtr, ExprPtr>> bindings;
};
struct BoxDim {
  ExprPtr dim;
  std::optional<DomainExpr> domain;
};
/// `Box[d in lo..hi, e | pred]`; pred is null when absent.
struct BoxExpr {
  std::vector<BoxDim> dims;
  ExprPtr pred;
};
/// `{C1, C2}`
struct SetExpr {
  std::vector<ExprPtr> elems;
};
/// `<e1, ..., en> d`
struct TupleStream {
  std::vector<ExprPtr> elems;
  ExprPtr dim;
};
struct Select {
  ExprPtr ctx, stream;
};
/// `C.d`
struct Dot {
  ExprPtr ctx, dim;
};

enum class IntensionalOp : std::uint8_t { First, Next, Prev, Fby, Wvr, Asa, Upon };

/// Surface-only navigation operator; the compiler lowers these to `@`/`#`.
struct Intensional {
  IntensionalOp op;
  ExprPtr dim;
  std::vector<ExprPtr> args;
};

struct Expr {
  using Node = std::variant<Literal, IdRef, OpApply, FunCall, If, TagQuery, HashNullary, At3, AtCtx,
                            Where, CtxBuild, BoxExpr, SetExpr, TupleStream, Select, Dot,
                            Intensional>;
  Node node;
  SourcePos pos;

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const noexcept {
    return std::holds_alternative<T>(node);
  }
};

std::string_view intensionalName(IntensionalOp op) noexcept;
std::optional<IntensionalOp> intensionalFromName(std::string_view name) noexcept;

/// Structural equality that ignores source positions.
bool sameExpr(const Expr& a, const Expr& b);
bool sameExpr(const ExprPtr& a, const ExprPtr& b);
bool sameDecl(const Decl& a, const Decl& b);
bool sameDomain(const std::optional<DomainExpr>& a, const std::optional<DomainExpr>& b);

/// Name of the dimension an expression denotes syntactically (an IdRef), or
/// null when it must be computed.
const std::string* staticName(const ExprPtr& e) noexcept;

namespace ast {

ExprPtr make(Expr::Node node, SourcePos pos = {});
ExprPtr lit(Value v, SourcePos pos = {});
ExprPtr id(std::string name, SourcePos pos = {});
/// OpApply with a built-in operator named `op`.
ExprPtr op(const std::string& op, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr call(ExprPtr fn, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr ifThen(ExprPtr c, ExprPtr t, ExprPtr e, SourcePos pos = {});
ExprPtr tagOf(ExprPtr dim, SourcePos pos = {});
ExprPtr at3(ExprPtr body, ExprPtr dim, ExprPtr tag, SourcePos pos = {});
ExprPtr where(ExprPtr body, std::vector<Decl> decls, SourcePos pos = {});

Decl dimDecl(std::string name, std::optional<DomainExpr> domain = {}, SourcePos pos = {});
Decl varDecl(std::string name, ExprPtr body, SourcePos pos = {});
Decl funDecl(std::string name, std::vector<std::string> params, ExprPtr body, SourcePos pos = {});
Decl procDecl(std::string name, std::size_t arity, SourcePos pos = {});

}  // namespace ast

/// Pre-order visit of every sub-expression, including declaration bodies and
/// domains.
void forEachChild(const Expr& e, const std::function<void(const ExprPtr&)>& fn);
void forEachNode(const ExprPtr& e, const std::function<void(const Expr&)>& fn);

/// Copy of `e` with every direct child (including declaration bodies and
/// domains) replaced by `fn(child)`. Keeps the source position.
ExprPtr mapChildren(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn);

}  // namespace iplc
