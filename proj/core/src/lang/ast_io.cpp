#include "iplc/ast_io.hpp"

#include "iplc/builtins.hpp"
#include "iplc/error.hpp"
#include "iplc/text.hpp"

namespace iplc {

namespace {

std::string join(const std::vector<ExprPtr>& xs, std::string (*fn)(const ExprPtr&),
                 std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += fn(xs[i]);
  }
  return out;
}

std::string printLiteral(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int:
      return v.asInt() < 0 ? "(" + v.text() + ")" : v.text();
    case Value::Kind::Float:
      return v.asFloat() < 0 ? "(" + v.text() + ")" : v.text();
    case Value::Kind::Dim: return v.asDim().name;
    case Value::Kind::Fun: return v.asFun().name;
    case Value::Kind::Op: return v.asOp().name;
    default: return v.text();
  }
}

std::string printDomain(const DomainExpr& dom) {
  if (dom.form == DomainExpr::Form::Range) {
    return printExpr(dom.items.at(0)) + ".." + printExpr(dom.items.at(1));
  }
  return "{" + join(dom.items, printExpr, ", ") + "}";
}

struct Printer {
  std::string operator()(const Literal& n) const { return printLiteral(n.value); }
  std::string operator()(const IdRef& n) const { return n.name; }
  std::string operator()(const OpApply& n) const {
    const std::string* name = staticName(n.op);
    const BuiltinOp* op = name ? findBuiltin(*name) : nullptr;
    if (op && !op->symbol.empty()) {
      if (op->minArity == 1 && n.args.size() == 1) {
        // `-3` would read back as a literal, so a negated number keeps its parens.
        const auto* l = n.args[0]->as<Literal>();
        bool number = l && (l->value.isInt() || l->value.isFloat());
        std::string arg = printExpr(n.args[0]);
        return "(" + std::string(op->symbol) + (number ? "(" + arg + ")" : arg) + ")";
      }
      if (op->minArity == 2 && n.args.size() == 2) {
        return "(" + printExpr(n.args[0]) + " " + std::string(op->symbol) + " " +
               printExpr(n.args[1]) + ")";
      }
    }
    return printExpr(n.op) + "(" + join(n.args, printExpr, ", ") + ")";
  }
  std::string operator()(const FunCall& n) const {
    return printExpr(n.fn) + "(" + join(n.args, printExpr, ", ") + ")";
  }
  std::string operator()(const If& n) const {
    return "(if " + printExpr(n.cond) + " then " + printExpr(n.then) + " else " +
           printExpr(n.otherwise) + ")";
  }
  std::string operator()(const TagQuery& n) const { return "(#" + printExpr(n.dim) + ")"; }
  std::string operator()(const HashNullary&) const { return "(#)"; }
  std::string operator()(const At3& n) const {
    return "(" + printExpr(n.body) + " @ " + printExpr(n.dim) + " " + printExpr(n.tag) + ")";
  }
  std::string operator()(const AtCtx& n) const {
    return "(" + printExpr(n.body) + " @ " + printExpr(n.ctx) + ")";
  }
  std::string operator()(const Where& n) const {
    std::string out = "(" + printExpr(n.body) + " where";
    for (const auto& d : n.decls) out += " " + printDecl(d);
    return out + " end)";
  }
  std::string operator()(const CtxBuild& n) const {
    std::string out = "[";
    for (std::size_t i = 0; i < n.bindings.size(); ++i) {
      if (i) out += ", ";
      out += printExpr(n.bindings[i].first) + ":" + printExpr(n.bindings[i].second);
    }
    return out + "]";
  }
  std::string operator()(const BoxExpr& n) const {
    std::string out = "Box[";
    for (std::size_t i = 0; i < n.dims.size(); ++i) {
      if (i) out += ", ";
      out += printExpr(n.dims[i].dim);
      if (n.dims[i].domain) out += " in " + printDomain(*n.dims[i].domain);
    }
    if (n.pred) out += " | " + printExpr(n.pred);
    return out + "]";
  }
  std::string operator()(const SetExpr& n) const { return "{" + join(n.elems, printExpr, ", ") + "}"; }
  std::string operator()(const TupleStream& n) const {
    return "(<" + join(n.elems, printExpr, ", ") + "> " + printExpr(n.dim) + ")";
  }
  std::string operator()(const Select& n) const {
    return "select(" + printExpr(n.ctx) + ", " + printExpr(n.stream) + ")";
  }
  std::string operator()(const Dot& n) const {
    return "(" + printExpr(n.ctx) + "." + printExpr(n.dim) + ")";
  }
  std::string operator()(const Intensional& n) const {
    std::string op = std::string(intensionalName(n.op)) + "." + printExpr(n.dim);
    if (n.args.size() == 1) return "(" + op + " " + printExpr(n.args[0]) + ")";
    return "(" + printExpr(n.args.at(0)) + " " + op + " " + printExpr(n.args.at(1)) + ")";
  }
};

}  // namespace

std::string printExpr(const ExprPtr& e) {
  if (!e) return "?";
  return std::visit(Printer{}, e->node);
}

std::string printDecl(const Decl& d) {
  switch (d.kind) {
    case Decl::Kind::Dim: {
      std::string out = "dimension " + d.name;
      if (d.domain) out += " in " + printDomain(*d.domain);
      return out + ";";
    }
    case Decl::Kind::Var: return d.name + " = " + printExpr(d.body) + ";";
    case Decl::Kind::Fun: {
      std::string out = d.name + "(";
      for (std::size_t i = 0; i < d.params.size(); ++i) {
        if (i) out += ", ";
        out += d.params[i];
      }
      return out + ") = " + printExpr(d.body) + ";";
    }
    case Decl::Kind::Proc: {
      std::string out = "procedure " + d.name + "(";
      for (std::size_t i = 0; i < d.arity; ++i) {
        if (i) out += ", ";
        out += "a" + std::to_string(i + 1);
      }
      return out + ");";
    }
  }
  return {};
}

std::string printProgram(const ExprPtr& root, const std::vector<Decl>& decls) {
  std::string out = printExpr(root);
  if (decls.empty()) return out;
  out += "\nwhere\n";
  for (const auto& d : decls) out += "  " + printDecl(d) + "\n";
  return out + "end\n";
}

// S-expressions.

namespace {

std::string sexprList(const std::vector<ExprPtr>& xs) {
  std::string out;
  for (const auto& x : xs) out += " " + toSexpr(x);
  return out;
}

struct SexprWriter {
  std::string operator()(const Literal& n) const { return "(lit " + n.value.text() + ")"; }
  std::string operator()(const IdRef& n) const { return "(id " + n.name + ")"; }
  std::string operator()(const OpApply& n) const {
    return "(op " + toSexpr(n.op) + sexprList(n.args) + ")";
  }
  std::string operator()(const FunCall& n) const {
    return "(call " + toSexpr(n.fn) + sexprList(n.args) + ")";
  }
  std::string operator()(const If& n) const {
    return "(if " + toSexpr(n.cond) + " " + toSexpr(n.then) + " " + toSexpr(n.otherwise) + ")";
  }
  std::string operator()(const TagQuery& n) const { return "(tag " + toSexpr(n.dim) + ")"; }
  std::string operator()(const HashNullary&) const { return "(hash)"; }
  std::string operator()(const At3& n) const {
    return "(at3 " + toSexpr(n.body) + " " + toSexpr(n.dim) + " " + toSexpr(n.tag) + ")";
  }
  std::string operator()(const AtCtx& n) const {
    return "(atc " + toSexpr(n.body) + " " + toSexpr(n.ctx) + ")";
  }
  std::string operator()(const Where& n) const {
    std::string out = "(where " + toSexpr(n.body);
    for (const auto& d : n.decls) out += " " + toSexpr(d);
    return out + ")";
  }
  std::string operator()(const CtxBuild& n) const {
    std::string out = "(ctx";
    for (const auto& [d, t] : n.bindings) out += " (" + toSexpr(d) + " " + toSexpr(t) + ")";
    return out + ")";
  }
  std::string operator()(const BoxExpr& n) const {
    std::string out = "(box (";
    for (std::size_t i = 0; i < n.dims.size(); ++i) {
      if (i) out += " ";
      out += "(" + toSexpr(n.dims[i].dim) + " " + toSexpr(n.dims[i].domain) + ")";
    }
    return out + ") " + (n.pred ? toSexpr(n.pred) : std::string("(none)")) + ")";
  }
  std::string operator()(const SetExpr& n) const { return "(set" + sexprList(n.elems) + ")"; }
  std::string operator()(const TupleStream& n) const {
    return "(tuple " + toSexpr(n.dim) + sexprList(n.elems) + ")";
  }
  std::string operator()(const Select& n) const {
    return "(select " + toSexpr(n.ctx) + " " + toSexpr(n.stream) + ")";
  }
  std::string operator()(const Dot& n) const {
    return "(dot " + toSexpr(n.ctx) + " " + toSexpr(n.dim) + ")";
  }
  std::string operator()(const Intensional& n) const {
    return "(intens " + std::string(intensionalName(n.op)) + " " + toSexpr(n.dim) +
           sexprList(n.args) + ")";
  }
};

std::vector<ExprPtr> readUntilClose(TextCursor& cur) {
  std::vector<ExprPtr> out;
  while (cur.peek() != ')') out.push_back(readSexpr(cur));
  cur.expect(')');
  return out;
}

}  // namespace

std::string toSexpr(const ExprPtr& e) {
  if (!e) return "(none)";
  return std::visit(SexprWriter{}, e->node);
}

std::string toSexpr(const std::optional<DomainExpr>& dom) {
  if (!dom) return "(none)";
  return std::string(dom->form == DomainExpr::Form::Range ? "(range" : "(list") +
         sexprList(dom->items) + ")";
}

std::string toSexpr(const Decl& d) {
  switch (d.kind) {
    case Decl::Kind::Dim: return "(dim " + d.name + " " + toSexpr(d.domain) + ")";
    case Decl::Kind::Var: return "(var " + d.name + " " + toSexpr(d.body) + ")";
    case Decl::Kind::Fun: {
      std::string out = "(fun " + d.name + " (";
      for (std::size_t i = 0; i < d.params.size(); ++i) {
        if (i) out += " ";
        out += d.params[i];
      }
      return out + ") " + toSexpr(d.body) + ")";
    }
    case Decl::Kind::Proc: return "(proc " + d.name + " " + std::to_string(d.arity) + ")";
  }
  return {};
}

std::optional<DomainExpr> readSexprDomain(TextCursor& cur) {
  cur.expect('(');
  if (cur.consumeWord("none")) {
    cur.expect(')');
    return std::nullopt;
  }
  DomainExpr dom;
  if (cur.consumeWord("range")) {
    dom.form = DomainExpr::Form::Range;
  } else if (cur.consumeWord("list")) {
    dom.form = DomainExpr::Form::List;
  } else {
    cur.fail("expected domain");
  }
  dom.items = readUntilClose(cur);
  if (dom.form == DomainExpr::Form::Range && dom.items.size() != 2) cur.fail("range needs two bounds");
  if (dom.items.empty()) cur.fail("empty domain");
  return dom;
}

Decl readSexprDecl(TextCursor& cur) {
  cur.expect('(');
  std::string head = cur.readIdentifier();
  Decl d;
  d.name = cur.readIdentifier();
  if (head == "dim") {
    d.kind = Decl::Kind::Dim;
    d.domain = readSexprDomain(cur);
  } else if (head == "var") {
    d.kind = Decl::Kind::Var;
    d.body = readSexpr(cur);
  } else if (head == "fun") {
    d.kind = Decl::Kind::Fun;
    cur.expect('(');
    while (cur.peek() != ')') d.params.push_back(cur.readIdentifier());
    cur.expect(')');
    d.body = readSexpr(cur);
  } else if (head == "proc") {
    d.kind = Decl::Kind::Proc;
    Tag n = cur.readNumber();
    if (!n.isInt() || n.asInt() < 0) cur.fail("bad arity");
    d.arity = static_cast<std::size_t>(n.asInt());
  } else {
    cur.fail("unknown declaration '" + head + "'");
  }
  cur.expect(')');
  return d;
}

ExprPtr readSexpr(TextCursor& cur) {
  using namespace ast;
  cur.expect('(');
  std::string head = cur.readIdentifier();
  auto one = [&] { return readSexpr(cur); };
  auto close = [&](ExprPtr e) {
    cur.expect(')');
    return e;
  };
  if (head == "lit") return close(lit(readValue(cur)));
  if (head == "id") return close(id(cur.readIdentifier()));
  if (head == "op" || head == "call") {
    ExprPtr fn = one();
    auto args = readUntilClose(cur);
    if (head == "op") return make(OpApply{fn, std::move(args)});
    return make(FunCall{fn, std::move(args)});
  }
  if (head == "if") {
    ExprPtr c = one();
    ExprPtr t = one();
    ExprPtr e = one();
    return close(ifThen(c, t, e));
  }
  if (head == "tag") return close(tagOf(one()));
  if (head == "hash") return close(make(HashNullary{}));
  if (head == "at3") {
    ExprPtr b = one();
    ExprPtr d = one();
    ExprPtr t = one();
    return close(at3(b, d, t));
  }
  if (head == "atc") {
    ExprPtr b = one();
    ExprPtr c = one();
    return close(make(AtCtx{b, c}));
  }
  if (head == "where") {
    ExprPtr body = one();
    std::vector<Decl> decls;
    while (cur.peek() != ')') decls.push_back(readSexprDecl(cur));
    return close(where(body, std::move(decls)));
  }
  if (head == "ctx") {
    CtxBuild n;
    while (cur.consume('(')) {
      ExprPtr d = one();
      ExprPtr t = one();
      cur.expect(')');
      n.bindings.emplace_back(d, t);
    }
    return close(make(std::move(n)));
  }
  if (head == "box") {
    BoxExpr n;
    cur.expect('(');
    while (cur.consume('(')) {
      BoxDim bd;
      bd.dim = one();
      bd.domain = readSexprDomain(cur);
      cur.expect(')');
      n.dims.push_back(std::move(bd));
    }
    cur.expect(')');
    if (n.dims.empty()) cur.fail("Box without dimensions");
    if (cur.peek() == '(' && cur.rest().starts_with("(none)")) {
      cur.expect('(');
      cur.consumeWord("none");
      cur.expect(')');
    } else {
      n.pred = one();
    }
    return close(make(std::move(n)));
  }
  if (head == "set") return make(SetExpr{readUntilClose(cur)});
  if (head == "tuple") {
    ExprPtr d = one();
    auto elems = readUntilClose(cur);
    if (elems.empty()) cur.fail("empty tuple");
    return make(TupleStream{std::move(elems), d});
  }
  if (head == "select") {
    ExprPtr c = one();
    ExprPtr s = one();
    return close(make(Select{c, s}));
  }
  if (head == "dot") {
    ExprPtr c = one();
    ExprPtr d = one();
    return close(make(Dot{c, d}));
  }
  if (head == "intens") {
    auto op = intensionalFromName(cur.readIdentifier());
    if (!op) cur.fail("unknown intensional operator");
    ExprPtr d = one();
    auto args = readUntilClose(cur);
    std::size_t want = (*op == IntensionalOp::First || *op == IntensionalOp::Next ||
                        *op == IntensionalOp::Prev)
                           ? 1
                           : 2;
    if (args.size() != want) cur.fail("wrong operand count");
    return make(Intensional{*op, d, std::move(args)});
  }
  cur.fail("unknown node '" + head + "'");
}

ExprPtr parseSexpr(std::string_view text) {
  TextCursor cur(text);
  ExprPtr e = readSexpr(cur);
  cur.expectEnd();
  return e;
}

}  // namespace iplc
