#include <doctest.h>

#include <algorithm>

#include "generators.hpp"
#include "iplc/context.hpp"
#include "iplc/error.hpp"

using namespace iplc;
using iplc::testing::randomContext;
using iplc::testing::randomContextSet;
using iplc::testing::Rng;

namespace {

ErrorCode codeOf(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an iplc::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("override is right-biased") {
  CHECK(override(Context{}, Context{{"d", 1}}) == Context{{"d", 1}});
  CHECK(override(Context{{"d", 0}, {"e", 2}}, Context{{"d", 5}}) == Context{{"d", 5}, {"e", 2}});
  CHECK(override(Context{{"x", 1}}, Context{{"x", 1}}) == Context{{"x", 1}});
}

TEST_CASE("lookup") {
  CHECK(lookup(Context{{"t", 0}}, "t") == Tag{0});
  CHECK(lookup(Context{{"day", 3}, {"place", "Montreal"}}, "place") == Tag{"Montreal"});
  CHECK(codeOf([] { lookup(Context{{"t", 0}}, "s"); }) == ErrorCode::UnboundDimension);
}

TEST_CASE("project") {
  CHECK(project(Context{{"x", 3}, {"y", 4}}, {"x"}) == Context{{"x", 3}});
  CHECK(project(Context{{"x", 3}}, {}) == Context{});
  CHECK(project(Context{{"x", 3}}, {"y"}) == Context{});
}

TEST_CASE("dot") {
  CHECK(dot(Context{{"x", 3}, {"y", 4}}, "x") == Tag{3});
  CHECK(dot(Context{{"day", 7}}, "day") == Tag{7});
  CHECK(codeOf([] { dot(Context{{"x", 3}}, "z"); }) == ErrorCode::UnboundDimension);
}

TEST_CASE("box") {
  std::vector<TagDomain> doms{TagDomain::range("d1", 0, 1), TagDomain::range("d2", 0, 1)};
  CHECK(box(doms, [](const Context&) { return true; }).size() == 4);

  auto le = [](const Context& c) { return lookup(c, "d1").asInt() <= lookup(c, "d2").asInt(); };
  // Oracle: enumerate the four candidates by hand and keep those with d1 <= d2.
  ContextSet expected;
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) {
      if (a <= b) expected.insert(Context{{"d1", a}, {"d2", b}});
    }
  }
  CHECK(expected.size() == 3);
  CHECK(box(doms, le) == expected);
  CHECK(box(doms, le) == ContextSet{Context{{"d1", 0}, {"d2", 0}}, Context{{"d1", 0}, {"d2", 1}},
                                     Context{{"d1", 1}, {"d2", 1}}});

  CHECK(box({TagDomain::range("d", 1, 3)}, [](const Context&) { return false; }).empty());
}

TEST_CASE("box rejects bad domains") {
  CHECK(codeOf([] { box({}, [](const Context&) { return true; }); }) == ErrorCode::TypeError);
  CHECK(codeOf([] {
          box({TagDomain::range("d", 0, 1), TagDomain::range("d", 0, 1)},
              [](const Context&) { return true; });
        }) == ErrorCode::TypeError);
  CHECK(codeOf([] { TagDomain("d", {}); }) == ErrorCode::TypeError);
  CHECK(codeOf([] { TagDomain("d", {Tag{1}, Tag{1}}); }) == ErrorCode::TypeError);
}

TEST_CASE("box predicate errors propagate") {
  CHECK(codeOf([] {
          box({TagDomain::range("d", 0, 1)}, [](const Context& c) {
            return lookup(c, "missing").asBool();
          });
        }) == ErrorCode::UnboundDimension);
}

TEST_CASE("set operators") {
  ContextSet d1{Context{{"d", 1}}};
  ContextSet d2{Context{{"d", 2}}};
  CHECK(setUnion(d1, d2) == ContextSet{Context{{"d", 1}}, Context{{"d", 2}}});
  CHECK(setIntersect(setUnion(d1, d2), d2) == d2);
  CHECK(setDifference(d1, d1).empty());
}

TEST_CASE("ctxMerge") {
  CHECK(ctxMerge(Context{{"x", 1}}, Context{{"y", 2}}) == Context{{"x", 1}, {"y", 2}});
  CHECK(ctxMerge(Context{{"x", 1}}, Context{{"x", 1}, {"y", 2}}) == Context{{"x", 1}, {"y", 2}});
  CHECK(codeOf([] { ctxMerge(Context{{"x", 1}}, Context{{"x", 2}}); }) ==
        ErrorCode::ConflictingTags);
}

TEST_CASE("dimDifference drops dimensions") {
  CHECK(dimDifference(Context{{"x", 1}, {"y", 2}}, {"x"}) == Context{{"y", 2}});
}

TEST_CASE("tags") {
  CHECK_FALSE(Tag{1} == Tag{1.0});
  CHECK(compareTags(Tag{1}, Tag{2}) == std::strong_ordering::less);
  CHECK(compareTags(Tag{"b"}, Tag{"a"}) == std::strong_ordering::greater);
  CHECK(codeOf([] { (void)compareTags(Tag{1}, Tag{"a"}); }) == ErrorCode::TagKindMismatch);
  CHECK(codeOf([] { (void)compareTags(Tag{1}, Tag{1.0}); }) == ErrorCode::TagKindMismatch);
  CHECK(codeOf([] { (void)compareTags(Tag{true}, Tag{false}); }) == ErrorCode::TagKindMismatch);
  CHECK(codeOf([] { DimensionName{"9lives"}; }) == ErrorCode::InvalidDimension);
  CHECK(codeOf([] { DimensionName{""}; }) == ErrorCode::InvalidDimension);
}

TEST_CASE("canonical text") {
  Context c{{"place", "New York"}, {"day", 3}, {"w", 2.5}, {"b", true}, {"f", 2.0}};
  CHECK(c.text() == R"([b:true,day:3,f:2.0,place:"New York",w:2.5])");
  CHECK(ContextSet{Context{{"d", 2}}, Context{{"d", 1}}}.text() == "{[d:1],[d:2]}");
  CHECK(ContextSet{}.text() == "{}");
  CHECK(Context{}.text() == "[]");
  CHECK(Tag{0.1}.text() == "0.1");
  CHECK(Tag{"a\"b\\c\n"}.text() == R"("a\"b\\c\n")");
  CHECK(parseContext(" [ t : 5 , s:\"x y\" ] ") == Context{{"t", 5}, {"s", "x y"}});
  CHECK(parseTag("-4") == Tag{-4});
  CHECK(parseTag("1e3") == Tag{1000.0});
}

TEST_CASE("malformed canonical text") {
  for (const char* bad : {"[t:]", "[t 5]", "[t:5", "[t:1,t:2]", "[1:2]", "t:5", "[t:5]x", "[t:\"open]"}) {
    CAPTURE(bad);
    CHECK(codeOf([&] { parseContext(bad); }) == ErrorCode::SyntaxError);
  }
  CHECK(codeOf([] { parseContextSet("{[d:1],}"); }) == ErrorCode::SyntaxError);
}

TEST_CASE("property: override laws") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    Context a = randomContext(rng), b = randomContext(rng), c = randomContext(rng);
    CHECK(override(override(a, b), c) == override(a, override(b, c)));
    CHECK(override(a, Context{}) == a);
    CHECK(override(Context{}, a) == a);
    auto r = override(a, b);
    for (const auto& [d, t] : r.bindings()) {
      CHECK(t == (b.contains(d) ? lookup(b, d) : lookup(a, d)));
    }
    auto dims = a.dimensions();
    for (const auto& d : b.dimensions()) dims.insert(d);
    CHECK(r.dimensions() == dims);
  }
}

TEST_CASE("property: dot agrees with lookup") {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    Context c = randomContext(rng);
    for (const auto& [d, t] : c.bindings()) CHECK(dot(c, d) == lookup(c, d));
  }
}

TEST_CASE("property: box against brute force") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    std::vector<TagDomain> doms;
    auto n = iplc::testing::uniformInt(rng, 1, 3);
    std::size_t product = 1;
    for (std::int64_t k = 0; k < n; ++k) {
      auto size = iplc::testing::uniformInt(rng, 1, 4);
      doms.push_back(TagDomain::range(DimensionName{std::string(1, static_cast<char>('a' + k))}, 0,
                                      size - 1));
      product *= static_cast<std::size_t>(size);
    }
    auto threshold = iplc::testing::uniformInt(rng, 0, 6);
    auto pred = [&](const Context& c) {
      std::int64_t sum = 0;
      for (const auto& [d, t] : c.bindings()) sum += t.asInt();
      return sum <= threshold;
    };
    auto all = box(doms, [](const Context&) { return true; });
    CHECK(all.size() == product);
    auto some = box(doms, pred);
    for (const auto& c : some) {
      CHECK(all.contains(c));
      CHECK(pred(c));
      CHECK(c.size() == doms.size());
    }
    std::size_t expected = std::count_if(all.begin(), all.end(), pred);
    CHECK(some.size() == expected);
  }
}

TEST_CASE("property: set algebra") {
  Rng rng(14);
  for (int i = 0; i < 300; ++i) {
    ContextSet a = randomContextSet(rng), b = randomContextSet(rng);
    CHECK(setUnion(a, b) == setUnion(b, a));
    CHECK(setIntersect(a, b) == setIntersect(b, a));
    CHECK(setUnion(a, a) == a);
    CHECK(setIntersect(a, a) == a);
    CHECK(setDifference(a, a).empty());
    CHECK(setUnion(setDifference(a, b), setIntersect(a, b)) == a);
  }
}

TEST_CASE("property: canonical text round trip") {
  Rng rng(15);
  for (int i = 0; i < 500; ++i) {
    Context c = randomContext(rng, 5);
    CHECK(parseContext(c.text()) == c);
    ContextSet s = randomContextSet(rng);
    CHECK(parseContextSet(s.text()) == s);
  }
}
