#include <charconv>

#include "iplc/builtins.hpp"
#include "iplc/compiler.hpp"
#include "iplc/text.hpp"

namespace iplc {

using namespace ast;

namespace {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  ParsedProgram program() {
    if (peek().kind == TokenKind::Eof) fail("empty program: expected an expression");
    ParsedProgram out{stream(), {}};
    // Only an unparenthesized trailing `where` holds the program's
    // declarations; `(E where Q end)` stays an ordinary expression.
    if (acceptKw("where")) out.decls = block();
    expectEof();
    return out;
  }

  std::vector<Decl> declarations() {
    std::vector<Decl> out;
    while (peek().kind != TokenKind::Eof) declaration(out);
    return out;
  }

 private:
  // Token helpers.

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool isOp(std::string_view s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.kind == TokenKind::Operator || t.kind == TokenKind::Punct) && t.lexeme == s;
  }
  bool isKw(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).is(TokenKind::Keyword, s);
  }
  bool acceptOp(std::string_view s) {
    if (!isOp(s)) return false;
    take();
    return true;
  }
  bool acceptKw(std::string_view s) {
    if (!isKw(s)) return false;
    take();
    return true;
  }

  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::Eof) return "end of input";
    return std::string(tokenKindName(t.kind)) + " '" + t.lexeme + "'";
  }

  [[noreturn]] void fail(const std::string& msg) const { failAt(msg, peek()); }
  [[noreturn]] void failAt(const std::string& msg, const Token& t) const {
    throw CompileFailure(
        {CompileError{CompilePhase::Parse, ErrorCode::ParseError, msg, t.pos()}});
  }
  [[noreturn]] void expected(const std::string& what) const {
    fail("expected " + what + " but found " + describe(peek()));
  }

  void expectOp(std::string_view s) {
    if (!acceptOp(s)) expected("'" + std::string(s) + "'");
  }
  void expectKw(std::string_view s) {
    if (!acceptKw(s)) expected("'" + std::string(s) + "'");
  }
  void expectEof() {
    if (peek().kind != TokenKind::Eof) expected("end of input");
  }
  std::string identifier(const char* what = "identifier") {
    if (peek().kind != TokenKind::Identifier) expected(what);
    return take().lexeme;
  }

  /// Tokens that can begin a primary expression. `-`, `!` and `<` are left
  /// out so that `# - 1` and `X @ c < 3` keep their binary reading.
  bool startsPrimary(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    switch (t.kind) {
      case TokenKind::Identifier:
      case TokenKind::Int:
      case TokenKind::Float:
      case TokenKind::String: return true;
      case TokenKind::Keyword:
        return t.lexeme == "true" || t.lexeme == "false" || t.lexeme == "eod" ||
               t.lexeme == "if" || t.lexeme == "Box" || t.lexeme == "select";
      case TokenKind::Operator:
      case TokenKind::Punct:
        return t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{" || t.lexeme == "#";
      default: return false;
    }
  }

  // Expressions, loosest first.

  ExprPtr expr() {
    ExprPtr e = stream();
    while (isKw("where")) {
      SourcePos pos = take().pos();
      e = where(e, block(), pos);
    }
    return e;
  }

  /// Declarations up to and including `end`.
  std::vector<Decl> block() {
    std::vector<Decl> decls;
    while (!isKw("end")) {
      if (peek().kind == TokenKind::Eof) expected("'end' closing 'where'");
      declaration(decls);
    }
    take();
    return decls;
  }

  ExprPtr stream() {
    ExprPtr lhs = orExpr();
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword) {
      auto op = intensionalFromName(t.lexeme);
      if (op && (*op == IntensionalOp::Fby || *op == IntensionalOp::Wvr ||
                 *op == IntensionalOp::Asa || *op == IntensionalOp::Upon)) {
        SourcePos pos = take().pos();
        ExprPtr dim = dimSuffix();
        ExprPtr rhs = stream();
        return make(Intensional{*op, dim, {lhs, rhs}}, pos);
      }
    }
    return lhs;
  }

  ExprPtr dimSuffix() {
    expectOp(".");
    SourcePos pos = peek().pos();
    return id(identifier("dimension name after '.'"), pos);
  }

  ExprPtr binaryLevel(std::initializer_list<std::string_view> ops, ExprPtr (Parser::*next)()) {
    ExprPtr lhs = (this->*next)();
    while (true) {
      const Token& t = peek();
      if (t.kind != TokenKind::Operator) return lhs;
      bool match = false;
      for (auto o : ops) match = match || t.lexeme == o;
      if (!match) return lhs;
      SourcePos pos = t.pos();
      std::string sym = take().lexeme;
      ExprPtr rhs = (this->*next)();
      lhs = op(std::string(findInfix(sym)->name), {lhs, rhs}, pos);
    }
  }

  ExprPtr orExpr() { return binaryLevel({"||"}, &Parser::andExpr); }
  ExprPtr andExpr() { return binaryLevel({"&&"}, &Parser::comparison); }
  ExprPtr comparison() {
    return binaryLevel({"==", "!=", "<", "<=", ">", ">="}, &Parser::additive);
  }
  ExprPtr additive() { return binaryLevel({"+", "-"}, &Parser::multiplicative); }
  ExprPtr multiplicative() { return binaryLevel({"*", "/", "%"}, &Parser::unary); }

  ExprPtr unary() {
    const Token& t = peek();
    SourcePos pos = t.pos();
    if (isOp("-")) {
      const Token& n = peek(1);
      if (n.kind == TokenKind::Int || n.kind == TokenKind::Float) {
        take();
        return postfix(number(take(), true));
      }
      take();
      return op("neg", {unary()}, pos);
    }
    if (isOp("!")) {
      take();
      return op("not", {unary()}, pos);
    }
    if (t.kind == TokenKind::Keyword) {
      auto iop = intensionalFromName(t.lexeme);
      if (iop && (*iop == IntensionalOp::First || *iop == IntensionalOp::Next ||
                  *iop == IntensionalOp::Prev)) {
        take();
        ExprPtr dim = dimSuffix();
        return make(Intensional{*iop, dim, {unary()}}, pos);
      }
    }
    return postfix(primary());
  }

  ExprPtr postfix(ExprPtr e) {
    while (true) {
      SourcePos pos = peek().pos();
      if (acceptOp("@")) {
        e = atOperands(e, pos);
      } else if (isOp(".") && peek(1).kind == TokenKind::Identifier) {
        take();
        SourcePos dpos = peek().pos();
        e = make(Dot{e, id(take().lexeme, dpos)}, pos);
      } else if (isOp("(")) {
        e = application(e);
      } else {
        return e;
      }
    }
  }

  /// `callee(args)`: built-in operators apply directly, anything else is a
  /// function call.
  ExprPtr application(const ExprPtr& callee) {
    SourcePos pos = take().pos();
    auto args = arguments(")");
    const std::string* name = staticName(callee);
    if (name && findBuiltin(*name)) return make(OpApply{callee, std::move(args)}, pos);
    return call(callee, std::move(args), pos);
  }

  ExprPtr atOperands(const ExprPtr& body, SourcePos pos) {
    bool contextShaped = isOp("[") || isOp("{") || isKw("Box");
    if (!startsPrimary()) expected("a dimension or context after '@'");
    ExprPtr first = atOperand();
    if (contextShaped || !startsPrimary()) return make(AtCtx{body, first}, pos);
    ExprPtr tag = atOperand();
    return at3(body, first, tag, pos);
  }

  /// A primary, plus calls written flush against it: `X @ union(a, b)` is a
  /// context operand while `X @ t (#t + 1)` is dimension then tag.
  ExprPtr atOperand() {
    ExprPtr e = primary();
    while (isOp("(") && flush()) e = application(e);
    return e;
  }

  /// True when the next token starts right where the previous one ended.
  bool flush() const {
    if (pos_ == 0) return false;
    const Token& prev = toks_[pos_ - 1];
    const Token& next = peek();
    return prev.line == next.line &&
           prev.column + static_cast<int>(prev.lexeme.size()) == next.column;
  }

  std::vector<ExprPtr> arguments(std::string_view close) {
    std::vector<ExprPtr> out;
    if (acceptOp(close)) return out;
    do {
      out.push_back(expr());
    } while (acceptOp(","));
    expectOp(close);
    return out;
  }

  ExprPtr number(const Token& t, bool negate) {
    std::string text = (negate ? "-" : "") + t.lexeme;
    try {
      return lit(Value::fromTag(parseTag(text)), t.pos());
    } catch (const Error&) {
      failAt("numeric literal out of range: " + text, t);
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    SourcePos pos = t.pos();
    switch (t.kind) {
      case TokenKind::Int:
      case TokenKind::Float: return number(take(), false);
      case TokenKind::String: {
        try {
          TextCursor cur(t.lexeme);
          std::string s = cur.readQuoted();
          take();
          return lit(Value{std::move(s)}, pos);
        } catch (const Error& e) {
          failAt(std::string("bad string literal: ") + e.what(), t);
        }
      }
      case TokenKind::Identifier: return id(take().lexeme, pos);
      case TokenKind::Keyword: {
        if (acceptKw("true")) return lit(Value{true}, pos);
        if (acceptKw("false")) return lit(Value{false}, pos);
        if (acceptKw("eod")) return lit(Value{Eod{}}, pos);
        if (acceptKw("if")) {
          ExprPtr c = expr();
          expectKw("then");
          ExprPtr a = expr();
          expectKw("else");
          ExprPtr b = stream();
          return ifThen(c, a, b, pos);
        }
        if (acceptKw("Box")) return boxExpr(pos);
        if (acceptKw("select")) {
          expectOp("(");
          ExprPtr c = expr();
          expectOp(",");
          ExprPtr s = expr();
          expectOp(")");
          return make(Select{c, s}, pos);
        }
        break;
      }
      case TokenKind::Operator:
      case TokenKind::Punct: {
        if (acceptOp("(")) {
          ExprPtr e = expr();
          expectOp(")");
          return e;
        }
        if (acceptOp("#")) {
          if (startsPrimary()) return tagOf(primary(), pos);
          return make(HashNullary{}, pos);
        }
        if (acceptOp("[")) {
          CtxBuild c;
          if (!acceptOp("]")) {
            do {
              ExprPtr d = stream();
              expectOp(":");
              ExprPtr v = stream();
              c.bindings.emplace_back(d, v);
            } while (acceptOp(","));
            expectOp("]");
          }
          return make(std::move(c), pos);
        }
        if (acceptOp("{")) return make(SetExpr{arguments("}")}, pos);
        if (acceptOp("<")) {
          std::vector<ExprPtr> elems;
          do {
            elems.push_back(additive());
          } while (acceptOp(","));
          expectOp(">");
          if (!startsPrimary()) expected("the tuple's dimension");
          ExprPtr dim = primary();
          return make(TupleStream{std::move(elems), dim}, pos);
        }
        break;
      }
      default: break;
    }
    expected("an expression");
  }

  DomainExpr domain() {
    DomainExpr dom;
    if (acceptOp("{")) {
      dom.form = DomainExpr::Form::List;
      dom.items = arguments("}");
      if (dom.items.empty()) fail("empty tag domain");
      return dom;
    }
    dom.form = DomainExpr::Form::Range;
    ExprPtr lo = additive();
    expectOp("..");
    ExprPtr hi = additive();
    dom.items = {lo, hi};
    return dom;
  }

  ExprPtr boxExpr(SourcePos pos) {
    expectOp("[");
    BoxExpr b;
    do {
      SourcePos dpos = peek().pos();
      BoxDim bd{id(identifier("a Box dimension"), dpos), std::nullopt};
      if (acceptKw("in")) bd.domain = domain();
      b.dims.push_back(std::move(bd));
    } while (acceptOp(","));
    if (acceptOp("|")) b.pred = expr();
    expectOp("]");
    return make(std::move(b), pos);
  }

  // Declarations.

  void declaration(std::vector<Decl>& out) {
    SourcePos pos = peek().pos();
    if (acceptKw("dimension")) {
      do {
        SourcePos npos = peek().pos();
        std::string name = identifier("a dimension name");
        std::optional<DomainExpr> dom;
        if (acceptKw("in")) dom = domain();
        out.push_back(dimDecl(std::move(name), std::move(dom), npos));
      } while (acceptOp(","));
      expectOp(";");
      return;
    }
    if (acceptKw("procedure")) {
      std::string name = identifier("a procedure name");
      expectOp("(");
      std::size_t arity = 0;
      if (!acceptOp(")")) {
        do {
          identifier("a parameter name");
          ++arity;
        } while (acceptOp(","));
        expectOp(")");
      }
      expectOp(";");
      out.push_back(procDecl(std::move(name), arity, pos));
      return;
    }
    if (peek().kind != TokenKind::Identifier) expected("a declaration");
    std::string name = take().lexeme;
    if (acceptOp("(")) {
      std::vector<std::string> params;
      if (!acceptOp(")")) {
        do {
          params.push_back(identifier("a parameter name"));
        } while (acceptOp(","));
        expectOp(")");
      }
      expectOp("=");
      ExprPtr body = expr();
      expectOp(";");
      out.push_back(funDecl(std::move(name), std::move(params), body, pos));
      return;
    }
    expectOp("=");
    ExprPtr body = expr();
    expectOp(";");
    out.push_back(varDecl(std::move(name), body, pos));
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ParsedProgram parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

ParsedProgram parseSource(std::string_view source) { return parse(tokenize(source)); }

std::vector<Decl> parseDeclarations(std::string_view source) {
  auto tokens = tokenize(source);
  return Parser(tokens).declarations();
}

}  // namespace iplc
