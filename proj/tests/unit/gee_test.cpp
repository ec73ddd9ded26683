#include <doctest.h>

#include <atomic>
#include <thread>

#include "ast_gen.hpp"
#include "corpus.hpp"
#include "iplc/compiler.hpp"
#include "iplc/eval.hpp"
#include "points.hpp"

using namespace iplc;
using iplc::testing::corpus;
using iplc::testing::corpusProgram;
using iplc::testing::outcomeOf;
using iplc::testing::randomPointIn;
using iplc::testing::Rng;
using iplc::testing::uniformInt;

namespace {

const ProcedureRegistry& procs() {
  static const ProcedureRegistry r = standardProcedures();
  return r;
}

std::string naive(const Geer& g, const Context& at, EvalLimits limits = {}) {
  NaiveEvaluator n(g, procs(), limits);
  return outcomeOf([&] { return n.evalRoot(at); });
}

std::string eductive(const Geer& g, const Context& at, EvalLimits limits = {}) {
  Warehouse wh;
  EductiveEngine e(g, wh, procs(), limits);
  return outcomeOf([&] { return e.evalRoot(at); });
}

Value run(std::string_view src, const Context& at = {}) {
  Geer g = compile(src);
  Warehouse wh;
  return EductiveEngine(g, wh, procs()).evalRoot(at);
}

ErrorCode failure(std::string_view src, const Context& at = {}) {
  try {
    run(src, at);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an evaluation error");
  return ErrorCode::TypeError;
}

std::int64_t fibOracle(int n) {
  std::int64_t a = 0, b = 1;
  for (int i = 0; i < n; ++i) b = std::exchange(a, b) + b;
  return a;
}

bool exhausted(const std::string& outcome) {
  return outcome == "DepthExceeded" || outcome == "CyclicDemand";
}

}  // namespace

TEST_CASE("raining example and small programs") {
  Geer g = compile(corpusProgram("01_raining").source);
  Warehouse wh;
  EductiveEngine e(g, wh, procs());
  CHECK(e.evalRoot(parseContext("[day:3]")) == Value(true));
  CHECK(e.evalRoot(parseContext("[day:1]")) == Value(false));

  CHECK(run("#t where dimension t; end") == Value(std::int64_t{0}));
  CHECK(run("N @ t 5 where dimension t; N = 0 fby.t (N + 1); end") == Value(std::int64_t{5}));
  Value v = run("X @ {[d:1], [d:2]} where dimension d; X = #d * 10; end");
  REQUIRE(v.isSet());
  CHECK(v.text() == "{|10,20|}");
  CHECK(run("# where dimension t; end", parseContext("[t:4]")) == Value(parseContext("[t:4]")));
}

TEST_CASE("runtime errors") {
  CHECK(failure("1 / 0") == ErrorCode::DivisionByZero);
  CHECK(failure("1.5 / 0.0") == ErrorCode::DivisionByZero);
  CHECK(failure("9223372036854775807 + 1") == ErrorCode::TypeError);
  CHECK(failure("eod + 1") == ErrorCode::EodArith);
  CHECK(failure("if 1 then 2 else 3") == ErrorCode::NotABoolean);
  CHECK(failure("1 @ 2 3") == ErrorCode::NonDimensionAt);
  CHECK(failure("\"a\" < 1") == ErrorCode::TypeError);
  CHECK(failure("[d:1, d:2] where dimension d; end") == ErrorCode::ConflictingTags);
  CHECK(failure("X where X = X + 1; end") == ErrorCode::CyclicDemand);
  CHECK(failure("square(1, 2) where procedure square(x); end") == ErrorCode::ArityMismatch);
  CHECK(failure("nothing(1) where procedure nothing(x); end") == ErrorCode::UnknownProcedure);
  CHECK(failure("fail(1) where procedure fail(x); end") == ErrorCode::ProcedureFailed);
  CHECK(run("eod == 1") == Value(false));
  CHECK(run("1 == 1.0") == Value(true));
  CHECK(run("\"a\" == 1") == Value(false));
  CHECK(run("-7 % 3") == Value(std::int64_t{-1}));

  Geer g = compile("X where X = X + 1; end", {false});
  CHECK(naive(g, {}, {200, 100}) == "DepthExceeded");
}

TEST_CASE("corpus expectations hold on every evaluation route") {
  for (const auto& p : corpus()) {
    Geer surface = compile(p.source, {false});
    Geer lowered = compile(p.source);
    for (const auto& ex : p.expectations) {
      INFO(p.name, " at ", ex.at.text());
      CHECK(naive(surface, ex.at) == ex.value);
      CHECK(naive(lowered, ex.at) == ex.value);
      CHECK(eductive(lowered, ex.at) == ex.value);
    }
  }
}

TEST_CASE("corpus covers every inference rule") {
  RuleCoverage all;
  for (const auto& p : corpus()) {
    Geer surface = compile(p.source, {false});
    NaiveEvaluator n(surface, procs());
    for (const auto& ex : p.expectations) outcomeOf([&] { return n.evalRoot(ex.at); });
    all.merge(n.coverage());
  }
  std::string missing;
  for (Rule r : all.missing()) missing += std::string(ruleName(r)) + " ";
  CHECK(missing == "");
}

TEST_CASE("naive and eductive agree at random in-range points") {
  Rng rng(11);
  for (const auto& p : corpus()) {
    Geer surface = compile(p.source, {false});
    Geer lowered = compile(p.source);
    for (int i = 0; i < 10; ++i) {
      Context at = randomPointIn(lowered, rng);
      INFO(p.name, " at ", at.text());
      CHECK(naive(surface, at) == eductive(lowered, at));
    }
  }
}

TEST_CASE("lowering preserves meaning on random programs") {
  Rng rng(5);
  EvalLimits limits{400, 12};
  int compared = 0;
  for (int i = 0; i < 800; ++i) {
    testing::AstGen gen(rng);
    auto mentions = [](const ExprPtr& e, const std::string& name) {
      bool found = false;
      forEachNode(e, [&](const Expr& n) {
        if (const auto* r = n.as<IdRef>()) found = found || r->name == name;
      });
      return found;
    };
    ExprPtr y = gen.expr(2);
    ExprPtr x = gen.expr(2);
    if (mentions(y, "y") || mentions(y, "x") || mentions(y, "f") || mentions(x, "x") || mentions(x, "f")) {
      continue;
    }
    ParsedProgram prog{gen.expr(3),
                       {ast::dimDecl("t", DomainExpr{DomainExpr::Form::Range, {ast::lit(0), ast::lit(3)}}),
                        ast::dimDecl("s", DomainExpr{DomainExpr::Form::Range, {ast::lit(0), ast::lit(3)}}),
                        ast::varDecl("x", x), ast::varDecl("y", y),
                        ast::funDecl("f", {"a"}, ast::op("add", {ast::id("a"), ast::tagOf(ast::id("t"))}))}};
    AnalyzedProgram a = analyze(prog);
    Geer surface = buildGeer(a, {false});
    Geer lowered = buildGeer(a);
    Context at = randomPointIn(lowered, rng);
    std::string n = naive(surface, at, limits), e = eductive(lowered, at, limits);
    if (exhausted(n) || exhausted(e)) continue;
    INFO(geerSerialize(surface));
    CHECK(n == e);
    ++compared;
  }
  CHECK(compared > 250);
}

TEST_CASE("fib is computed once per point") {
  Geer g = compile(corpusProgram("04_fib").source);
  Warehouse wh;
  EductiveEngine e(g, wh, procs());
  CHECK(e.evalRoot(parseContext("[t:20]")) == Value(fibOracle(20)));
  CHECK(e.counters().demands <= 70);
  CHECK(wh.stats().recomputations == 0);
  CHECK(e.trace().count(DemandTrace::Event::Computed) == wh.stats().computed);

  auto before = wh.stats();
  std::size_t traced = e.trace().records().size();
  CHECK(e.evalRoot(parseContext("[t:20]")) == Value(fibOracle(20)));
  auto after = wh.stats();
  CHECK(after.computed == before.computed);
  CHECK(after.hits == before.hits + 1);
  REQUIRE(e.trace().records().size() == traced + 2);
  CHECK(e.trace().records().back().event == DemandTrace::Event::Hit);
}

TEST_CASE("demand trace invariants") {
  Rng rng(3);
  for (const auto& p : corpus()) {
    Geer g = compile(p.source);
    Warehouse wh;
    EductiveEngine e(g, wh, procs());
    for (int i = 0; i < 5; ++i) outcomeOf([&] { return e.evalRoot(randomPointIn(g, rng)); });
    const auto& t = e.trace();
    INFO(p.name);
    CHECK(t.count(DemandTrace::Event::Issued) >= t.count(DemandTrace::Event::Hit) +
                                                    t.count(DemandTrace::Event::Computed));
    std::set<std::string> computed;
    std::int64_t last = 0;
    for (const auto& r : t.records()) {
      CHECK(r.ns >= last);
      last = r.ns;
      if (r.event == DemandTrace::Event::Computed) CHECK(computed.insert(r.key.text()).second);
    }
    CHECK(wh.stats().recomputations == 0);
  }
  Geer g = compile(corpusProgram("03_natural").source);
  Warehouse wh;
  EductiveEngine e(g, wh, procs());
  e.evalRoot(parseContext("[t:2]"));
  std::string text = e.trace().exportText();
  CHECK(text.starts_with("issued " + g.programId + ":\"$root\"@[t:2] "));
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(e.trace().records().size()));
}

TEST_CASE("demand keys are rank-restricted") {
  Geer g = compile("N where dimension t; dimension s; N = 0 fby.t (N + 1); end");
  DemandKey k = demandKeyOf(g, "N", parseContext("[s:9, t:3]"));
  CHECK(k.context == parseContext("[t:3]"));
  CHECK(k.programId == g.programId);
  CHECK(DemandKey::parse(k.text()) == k);
  CHECK_THROWS_AS(demandKeyOf(g, "nope", {}), Error);

  DemandKey p = procedureKey(g.programId, "hypot", {Value(std::int64_t{3}), Value(std::int64_t{4})});
  CHECK(p.subject == "hypot(3,4)");
  CHECK(DemandKey::parse(p.text()) == p);
}

TEST_CASE("procedures") {
  CHECK(procs().call("hypot", std::vector{Value(std::int64_t{3}), Value(std::int64_t{4})}) == Value(5.0));
  CHECK(procs().call("concat", std::vector{Value(std::string("a")), Value(std::string("b"))}) ==
        Value(std::string("ab")));
  ProcedureRegistry r = standardProcedures();
  CHECK_THROWS_AS(r.add("square", 1, [](std::span<const Value> a) { return a[0]; }), Error);
  try {
    r.call("square", std::vector<Value>{});
    FAIL("expected ArityMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ArityMismatch);
  }

  Geer g = compile(corpusProgram("20_procedures").source);
  Warehouse wh;
  EductiveEngine e(g, wh, procs());
  e.evalRoot(parseContext("[t:4]"));
  CHECK(e.counters().proceduralDemands == 5);
}

TEST_CASE("context switch and off-rank irrelevance") {
  Rng rng(17);
  for (const auto& p : corpus()) {
    Geer g = compile(p.source);
    auto declared = g.dimensions();
    std::vector<DimensionName> dims(declared.begin(), declared.end());
    if (dims.empty()) continue;
    for (const auto& [name, entry] : g.entries) {
      if (entry.kind != EntryKind::Var) continue;
      for (int i = 0; i < 3; ++i) {
        Context point = startingPoint(g, randomPointIn(g, rng));
        Context other = startingPoint(g, randomPointIn(g, rng));
        const auto& d = dims[static_cast<std::size_t>(uniformInt(rng, 0, static_cast<std::int64_t>(dims.size()) - 1))];
        Tag v = lookup(other, d);
        Warehouse wh;
        EductiveEngine n(g, wh, procs());
        INFO(p.name, " ", name, " at ", point.text(), " ", d.str(), "=", v.text());
        std::string shifted = outcomeOf([&] {
          return n.eval(ast::at3(ast::id(name), ast::id(d.str()), ast::lit(Value::fromTag(v))), point);
        });
        std::string direct = outcomeOf([&] { return n.eval(ast::id(name), point.with(d, v)); });
        CHECK(shifted == direct);
        if (!entry.rank.contains(d)) {
          CHECK(direct == outcomeOf([&] { return n.eval(ast::id(name), point); }));
        }
      }
    }
  }
}

TEST_CASE("tuple, context set and nullary query laws") {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    auto n = uniformInt(rng, 1, 5);
    std::vector<std::int64_t> elems;
    std::string src = "<";
    for (std::int64_t k = 0; k < n; ++k) {
      elems.push_back(uniformInt(rng, -50, 50));
      src += (k ? ", " : "") + std::to_string(elems.back());
    }
    src += "> d where dimension d; end";
    Geer g = compile(src);
    auto at = uniformInt(rng, 0, 7);
    Warehouse wh;
    Value v = EductiveEngine(g, wh, procs()).evalRoot(parseContext("[d:" + std::to_string(at) + "]"));
    if (at < n) {
      CHECK(v == Value(elems[static_cast<std::size_t>(at)]));
    } else {
      CHECK(v.isEod());
    }
  }

  for (int i = 0; i < 50; ++i) {
    ContextSet s;
    auto count = uniformInt(rng, 0, 6);
    for (std::int64_t k = 0; k < count; ++k) s.insert(parseContext("[d:" + std::to_string(uniformInt(rng, 0, 20)) + "]"));
    std::string set = "{";
    bool firstElem = true;
    for (const auto& c : s) {
      set += (firstElem ? "" : ", ") + c.text();
      firstElem = false;
    }
    set += "}";
    Value v = run("(#d * 3) @ " + set + " where dimension d; end");
    REQUIRE(v.isSet());
    // #d*3 is injective, so one result per context.
    CHECK(v.asSet().size() == s.size());
  }

  Geer g = compile("# where dimension t; dimension s; end");
  NaiveEvaluator n(g, procs());
  Context p = parseContext("[s:2, t:1, zz:5]");
  CHECK(n.evalRoot(p) == Value(parseContext("[s:2, t:1]")));
}

TEST_CASE("warehouse computes each key at most once under contention") {
  Warehouse wh;
  DemandKey key{"p", "x", parseContext("[t:1]")};
  std::atomic<int> owners = 0;
  std::vector<std::thread> threads;
  std::vector<Value> seen(8);
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      int tag = 0;
      auto claim = wh.claimOrGet(key, &tag);
      if (claim.owner()) {
        ++owners;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        wh.fulfill(key, Value(std::int64_t{42}));
        seen[static_cast<std::size_t>(i)] = Value(std::int64_t{42});
      } else {
        seen[static_cast<std::size_t>(i)] = *claim.value;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(owners == 1);
  CHECK(wh.stats().computed == 1);
  CHECK(wh.stats().recomputations == 0);
  for (const auto& v : seen) CHECK(v == Value(std::int64_t{42}));

  CHECK_THROWS_AS(wh.insert(key, Value(std::int64_t{7})), Error);
  wh.insert(key, Value(std::int64_t{42}));
  CHECK_THROWS_AS(wh.fulfill(DemandKey{"p", "y", {}}, Value(true)), Error);

  DemandKey other{"p", "z", {}};
  int me = 0;
  REQUIRE(wh.claimOrGet(other, &me).owner());
  CHECK_THROWS_AS(wh.claimOrGet(other, &me), Error);
  wh.release(other);
  CHECK(wh.claimOrGet(other, &me).owner());
}
