#include <doctest.h>

#include <algorithm>

#include "ast_gen.hpp"
#include "corpus.hpp"
#include "iplc/ast_io.hpp"
#include "iplc/builtins.hpp"
#include "iplc/compiler.hpp"

using namespace iplc;
using namespace iplc::ast;
using iplc::testing::AstGen;
using iplc::testing::corpus;
using iplc::testing::corpusProgram;
using iplc::testing::Rng;

namespace {

CompileFailure failureOf(const auto& fn) {
  try {
    fn();
  } catch (const CompileFailure& e) {
    return e;
  }
  FAIL("expected a CompileFailure");
  throw;
}

ExprPtr parseExpr(std::string_view src) {
  auto p = parseSource(src);
  REQUIRE(p.decls.empty());
  return p.root;
}

bool hasIntensional(const ExprPtr& e) {
  bool found = false;
  forEachNode(e, [&](const Expr& n) { found = found || n.is<Intensional>(); });
  return found;
}

ExprPtr intens(IntensionalOp op, std::string d, std::vector<ExprPtr> args) {
  return make(Intensional{op, id(std::move(d)), std::move(args)});
}

}  // namespace

TEST_CASE("tokenize: literals, punctuation and positions") {
  auto toks = tokenize("42");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].kind == TokenKind::Int);
  CHECK(toks[0].lexeme == "42");
  CHECK(toks[1].kind == TokenKind::Eof);

  auto newton = tokenize("F = (G * m1 * m2) / r * r;");
  CHECK(newton.size() == 15);
  CHECK(newton.back().kind == TokenKind::Eof);
  std::vector<std::string> lexemes;
  for (const auto& t : newton) lexemes.push_back(t.lexeme);
  CHECK(lexemes == std::vector<std::string>{"F", "=", "(", "G", "*", "m1", "*", "m2", ")", "/",
                                            "r", "*", "r", ";", "<eof>"});

  auto mixed = tokenize("x <= 2.5e1 // tail\n/* block\n */ fby \"a\\\"b\"");
  REQUIRE(mixed.size() == 6);
  CHECK(mixed[1].is(TokenKind::Operator, "<="));
  CHECK(mixed[2].kind == TokenKind::Float);
  CHECK(mixed[3].is(TokenKind::Keyword, "fby"));
  CHECK(mixed[3].line == 3);
  CHECK(mixed[3].column == 5);
  CHECK(mixed[4].kind == TokenKind::String);

  auto range = tokenize("0..2");
  CHECK(range[0].kind == TokenKind::Int);
  CHECK(range[1].is(TokenKind::Operator, ".."));
}

TEST_CASE("tokenize: lexical errors carry positions") {
  auto e = failureOf([] { tokenize("\"unterminated"); });
  CHECK(e.code() == ErrorCode::LexError);
  REQUIRE(e.errors().size() == 1);
  CHECK(e.errors()[0].pos.line == 1);
  CHECK(e.errors()[0].pos.column == 1);
  CHECK(e.errors()[0].text().starts_with("1:1: lex error: "));

  auto illegal = failureOf([] { tokenize("a +\n  $"); });
  CHECK(illegal.errors()[0].pos.line == 2);
  CHECK(illegal.errors()[0].pos.column == 3);

  CHECK(failureOf([] { tokenize("x /* never closed"); }).code() == ErrorCode::LexError);
  CHECK(failureOf([] { tokenize("12ab"); }).code() == ErrorCode::LexError);
}

TEST_CASE("parse: worked examples") {
  CHECK(sameExpr(parseExpr("42"), lit(42)));

  // Same-precedence operators associate to the left: ((G*m1*m2)/r)*r.
  auto newton = parseExpr("(G * m1 * m2) / r * r");
  auto expected =
      op("mul", {op("div", {op("mul", {op("mul", {id("G"), id("m1")}), id("m2")}), id("r")}), id("r")});
  CHECK(sameExpr(newton, expected));

  auto p = parseSource("N where dimension t; N = 0 fby.t (N+1); end");
  CHECK(sameExpr(p.root, id("N")));
  REQUIRE(p.decls.size() == 2);
  CHECK(sameDecl(p.decls[0], dimDecl("t")));
  CHECK(sameDecl(p.decls[1],
                 varDecl("N", intens(IntensionalOp::Fby, "t", {lit(0), op("add", {id("N"), lit(1)})}))));
}

TEST_CASE("parse: precedence and operand shapes") {
  CHECK(sameExpr(parseExpr("#t + 1"), op("add", {tagOf(id("t")), lit(1)})));
  CHECK(sameExpr(parseExpr("a || b && c"), op("or", {id("a"), op("and", {id("b"), id("c")})})));
  CHECK(sameExpr(parseExpr("a - -3"), op("sub", {id("a"), lit(-3)})));
  CHECK(sameExpr(parseExpr("-x * 2"), op("mul", {op("neg", {id("x")}), lit(2)})));
  CHECK(sameExpr(parseExpr("!a == b"), op("eq", {op("not", {id("a")}), id("b")})));
  CHECK(sameExpr(parseExpr("1 < 2 == true"), op("eq", {op("lt", {lit(1), lit(2)}), lit(true)})));
  CHECK(sameExpr(parseExpr("#"), make(HashNullary{})));
  CHECK(sameExpr(parseExpr("# + 1"), op("add", {make(HashNullary{}), lit(1)})));

  // fby and friends nest to the right.
  CHECK(sameExpr(parseExpr("a fby.t b fby.t c"),
                 intens(IntensionalOp::Fby, "t", {id("a"), intens(IntensionalOp::Fby, "t", {id("b"), id("c")})})));
  CHECK(sameExpr(parseExpr("next.t N + 1"),
                 op("add", {intens(IntensionalOp::Next, "t", {id("N")}), lit(1)})));

  CHECK(sameExpr(parseExpr("X @ t 3"), at3(id("X"), id("t"), lit(3))));
  CHECK(sameExpr(parseExpr("X @ t #t + 1"), op("add", {at3(id("X"), id("t"), tagOf(id("t"))), lit(1)})));
  CHECK(parseExpr("X @ [t: 1]")->is<AtCtx>());
  CHECK(parseExpr("X @ {[t: 1], [t: 2]}")->is<AtCtx>());
  CHECK(parseExpr("X @ c")->is<AtCtx>());
  CHECK(parseExpr("X @ c + 1")->is<OpApply>());
  CHECK(parseExpr("X @ Box[t in 0..2]")->is<AtCtx>());

  CHECK(parseExpr("f(1, 2)")->is<FunCall>());
  CHECK(parseExpr("iseod(x)")->is<OpApply>());
  CHECK(parseExpr("c.t")->is<Dot>());
  CHECK(parseExpr("select([t: 1], <1, 2> t)")->is<Select>());
  CHECK(parseExpr("\"a\\nb\"")->as<Literal>()->value == Value{std::string("a\nb")});
}

TEST_CASE("parse: a Box keeps its inline domain") {
  auto e = parseExpr("Box[d in 0..2 | #d < 2]");
  const auto* box = e->as<BoxExpr>();
  REQUIRE(box);
  REQUIRE(box->dims.size() == 1);
  REQUIRE(box->dims[0].domain);
  CHECK(box->dims[0].domain->form == DomainExpr::Form::Range);
  CHECK(sameExpr(box->dims[0].domain->items[0], lit(0)));
  CHECK(sameExpr(box->dims[0].domain->items[1], lit(2)));
  CHECK(sameExpr(box->pred, op("lt", {tagOf(id("d")), lit(2)})));

  Geer g = compile("Box[d in 0..2 | #d < 2]");
  REQUIRE(g.root->is<BoxExpr>());
  CHECK(g.root->as<BoxExpr>()->dims[0].domain.has_value());
  CHECK(g.find("d")->kind == EntryKind::Dim);
}

TEST_CASE("parse: errors name the expected token") {
  auto empty = failureOf([] { parseSource(""); });
  CHECK(empty.code() == ErrorCode::ParseError);
  CHECK(failureOf([] { compile("   // nothing\n"); }).code() == ErrorCode::ParseError);

  auto dangling = failureOf([] { parseSource("1 +"); });
  CHECK(dangling.errors()[0].message.find("expected an expression") != std::string::npos);
  CHECK(dangling.errors()[0].pos.column == 4);

  auto noEnd = failureOf([] { parseSource("x where x = 1;"); });
  CHECK(noEnd.errors()[0].message.find("'end'") != std::string::npos);
  CHECK(failureOf([] { parseSource("x where x = 1 end"); }).code() == ErrorCode::ParseError);
  CHECK(failureOf([] { parseSource("(1"); }).code() == ErrorCode::ParseError);
  CHECK(failureOf([] { parseSource("1 2"); }).code() == ErrorCode::ParseError);
}

TEST_CASE("analyze: declarations, initial point and diagnostics") {
  auto a = analyze(parseSource("#t where dimension t; end"));
  CHECK(a.dimensions() == std::set<DimensionName>{DimensionName{"t"}});
  CHECK(a.initialPoint() == Context{{DimensionName{"t"}, Tag{0}}});

  auto dup = failureOf([] { analyze(parseSource("N where N = 1;\n N = 2; end")); });
  CHECK(dup.code() == ErrorCode::DuplicateDeclaration);
  CHECK(dup.errors()[0].pos.line == 2);

  auto unresolved = failureOf([] { analyze(parseSource("x where x = 1 + q; end")); });
  CHECK(unresolved.code() == ErrorCode::UnresolvedIdentifier);
  CHECK(unresolved.errors()[0].pos.column == 17);

  CHECK(failureOf([] { analyze(parseSource("x where add = 1; x = 2; end")); }).code() ==
        ErrorCode::DuplicateDeclaration);
  CHECK(failureOf([] { analyze(parseSource("f(1) where f(a, a) = a; end")); }).code() ==
        ErrorCode::DuplicateDeclaration);
  // Parameters are visible only in their own body.
  CHECK(failureOf([] { analyze(parseSource("a where f(a) = a; end")); }).code() ==
        ErrorCode::UnresolvedIdentifier);

  // Every problem is reported, in source order.
  auto many = failureOf([] { analyze(parseSource("p + q\nwhere\n  x = r;\nend")); });
  REQUIRE(many.errors().size() == 3);
  CHECK(many.errors()[0].message.find("'p'") != std::string::npos);
  CHECK(many.errors()[2].pos.line == 3);
}

TEST_CASE("analyze: nested blocks are renamed apart and tuple dimensions auto-declared") {
  auto a = analyze(parseSource(
      "x + y where x = 1; y = x where x = 2; end; end"));
  std::vector<std::string> names;
  for (const auto& d : a.globals) names.push_back(d.name);
  CHECK(names == std::vector<std::string>{"x", "y"});
  const auto* inner = a.globals[1].body->as<Where>();
  REQUIRE(inner);
  CHECK(inner->decls[0].name == "x__1");
  CHECK(sameExpr(inner->body, id("x__1")));

  auto tuple = analyze(parseSource("<1, 2> k"));
  CHECK(tuple.dimensions() == std::set<DimensionName>{DimensionName{"k"}});
  // An explicit declaration wins and no duplicate appears.
  auto declared = analyze(parseSource("<1, 2> k where dimension k in 0..1; end"));
  CHECK(declared.globals.size() == 1);
  CHECK(declared.globals[0].domain.has_value());
}

TEST_CASE("lower: rewrites to @ and # forms") {
  CHECK(sameExpr(lower(intens(IntensionalOp::First, "t", {id("X")})), at3(id("X"), id("t"), lit(0))));
  CHECK(sameExpr(lower(intens(IntensionalOp::Next, "t", {id("X")})),
                 at3(id("X"), id("t"), op("add", {tagOf(id("t")), lit(1)}))));
  CHECK(sameExpr(lower(intens(IntensionalOp::Prev, "t", {id("X")})),
                 at3(id("X"), id("t"), op("sub", {tagOf(id("t")), lit(1)}))));
  auto n1 = op("add", {id("N"), lit(1)});
  CHECK(sameExpr(lower(intens(IntensionalOp::Fby, "t", {lit(0), n1})),
                 ifThen(op("le", {tagOf(id("t")), lit(0)}), lit(0),
                        at3(n1, id("t"), op("sub", {tagOf(id("t")), lit(1)})))));
  CHECK(sameExpr(lower(lit(42)), lit(42)));

  for (auto o : {IntensionalOp::Wvr, IntensionalOp::Asa, IntensionalOp::Upon}) {
    auto out = lower(intens(o, "t", {id("X"), id("Y")}));
    CHECK_FALSE(hasIntensional(out));
  }

  // Fresh names avoid everything already spelled in the program.
  std::set<std::string> reserved{"wvr__1"};
  auto w = lower(intens(IntensionalOp::Wvr, "t", {id("X"), id("Y")}), reserved);
  const auto* where = w->as<Where>();
  REQUIRE(where);
  for (const auto& d : where->decls) CHECK(d.name != "wvr__1");
}

TEST_CASE("lower: idempotent and total on random surface expressions") {
  Rng rng(11);
  AstGen gen(rng, true);
  for (int i = 0; i < 300; ++i) {
    auto e = gen.expr(4);
    auto once = lower(e);
    CHECK_FALSE(hasIntensional(once));
    CHECK(sameExpr(lower(once), once));
  }
}

TEST_CASE("print then parse is the identity on random expressions") {
  Rng rng(5);
  AstGen gen(rng, true);
  for (int i = 0; i < 400; ++i) {
    auto e = gen.expr(4);
    std::string text = printExpr(e);
    auto back = parseExpr(text);
    INFO(text);
    INFO(toSexpr(e));
    INFO(toSexpr(back));
    CHECK(sameExpr(back, e));
  }
}

TEST_CASE("corpus: print/parse round trip and clean compiles") {
  REQUIRE(corpus().size() >= 20);
  for (const auto& prog : corpus()) {
    INFO(prog.name);
    auto parsed = parseSource(prog.source);
    auto reparsed = parseSource(printProgram(parsed.root, parsed.decls));
    CHECK(sameExpr(parsed.root, reparsed.root));
    REQUIRE(parsed.decls.size() == reparsed.decls.size());
    for (std::size_t i = 0; i < parsed.decls.size(); ++i) CHECK(sameDecl(parsed.decls[i], reparsed.decls[i]));

    Geer g = compile(prog.source);
    CHECK(g.programId.size() == 64);
    CHECK_FALSE(hasIntensional(g.root));
    // Independent walk: every identifier is an entry, a built-in, or bound
    // by an enclosing parameter list or local block.
    std::function<void(const ExprPtr&, std::set<std::string>)> walk = [&](const ExprPtr& e,
                                                                          std::set<std::string> bound) {
      if (const auto* r = e->as<IdRef>()) {
        CHECK_MESSAGE((g.find(r->name) || findBuiltin(r->name) || bound.contains(r->name)), r->name);
        return;
      }
      if (const auto* w = e->as<Where>()) {
        for (const auto& d : w->decls) bound.insert(d.name);
        for (const auto& d : w->decls) {
          auto inner = bound;
          inner.insert(d.params.begin(), d.params.end());
          if (d.body) walk(d.body, inner);
        }
        walk(w->body, bound);
        return;
      }
      forEachChild(*e, [&](const ExprPtr& c) { walk(c, bound); });
    };
    walk(g.root, {});
    for (const auto& [name, entry] : g.entries) {
      if (!entry.ast) continue;
      CHECK_FALSE(hasIntensional(entry.ast));
      walk(entry.ast, {entry.params.begin(), entry.params.end()});
    }
  }
}

TEST_CASE("compile: the raining program's dictionary") {
  Geer g = compile(corpusProgram("01_raining").source);
  std::vector<std::pair<std::string, EntryKind>> kinds;
  for (const auto& [name, e] : g.entries) kinds.emplace_back(name, e.kind);
  CHECK(kinds == std::vector<std::pair<std::string, EntryKind>>{{"day", EntryKind::Dim},
                                                                  {"raining", EntryKind::Var}});
  CHECK(g.rankOf("raining") == std::set<DimensionName>{DimensionName{"day"}});
  CHECK(sameExpr(g.root, id("raining")));
}

TEST_CASE("compile: entry kinds, hoisting and ranks") {
  Geer g = compile(
      "total where dimension t; procedure sq(a, b); c = 3; total = inner + #t "
      "where dimension k; inner = #k + c; end; end");
  CHECK(g.find("c")->kind == EntryKind::Const);
  CHECK(g.find("sq")->kind == EntryKind::Proc);
  CHECK(g.find("sq")->arity == 2);
  CHECK(g.procTable() == std::vector<ProcSignature>{{"sq", 2}});
  REQUIRE(g.find("inner__1"));
  CHECK(g.find("k__1")->kind == EntryKind::Dim);
  // The local dimension is reset on entry to its block, so it is not free
  // in `total`.
  CHECK(g.rankOf("total") == std::set<DimensionName>{DimensionName{"t"}});
  CHECK(g.rankOf("inner__1") == std::set<DimensionName>{DimensionName{"k__1"}});

  // Locals of a function body may capture parameters and stay in place.
  Geer f = compile("f(2) where f(n) = m where m = n * n; end; end");
  CHECK(f.entries.size() == 1);
  CHECK(f.find("f")->ast->is<Where>());

  CompileOptions surface;
  surface.lowerOperators = false;
  Geer s = compile(corpusProgram("03_natural").source, surface);
  CHECK(hasIntensional(s.find("N")->ast));
}

TEST_CASE("compile: deterministic across runs and declaration order") {
  Rng rng(3);
  for (const auto& prog : corpus()) {
    INFO(prog.name);
    std::string once = geerSerialize(compile(prog.source));
    CHECK(once == geerSerialize(compile(prog.source)));
    auto parsed = parseSource(prog.source);
    for (int k = 0; k < 3; ++k) {
      auto decls = parsed.decls;
      std::shuffle(decls.begin(), decls.end(), rng);
      CHECK(once == geerSerialize(compile(printProgram(parsed.root, decls))));
    }
    Geer back = geerParse(once);
    CHECK(geerSerialize(back) == once);
  }
}

TEST_CASE("compile: distinct programs get distinct ids") {
  std::set<std::string> ids;
  for (const auto& prog : corpus()) ids.insert(compile(prog.source).programId);
  CHECK(ids.size() == corpus().size());
}
