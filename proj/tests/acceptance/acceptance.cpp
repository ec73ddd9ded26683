// Runs every acceptance criterion at its tolerance and prints one PASS/FAIL
// line each. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "corpus.hpp"
#include "generators.hpp"
#include "iplc/ast_io.hpp"
#include "iplc/compiler.hpp"
#include "iplc/eval.hpp"
#include "iplc/tiers/cluster.hpp"
#include "points.hpp"

using namespace iplc;
using iplc::testing::corpus;
using iplc::testing::corpusProgram;
using iplc::testing::outcomeOf;
using iplc::testing::Rng;
using iplc::testing::uniformInt;

namespace {

/// Thrown by `expect` with what went wrong.
struct Failed {
  std::string why;
};

void expect(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

const ProcedureRegistry& procs() {
  static const ProcedureRegistry r = standardProcedures();
  return r;
}

std::string eductive(const Geer& g, const Context& at) {
  Warehouse wh;
  EductiveEngine e(g, wh, procs());
  e.setTracing(false);
  return outcomeOf([&] { return e.evalRoot(at); });
}

/// "F F T" -> {false, false, true}.
std::vector<bool> row(std::string_view text) {
  std::vector<bool> out;
  for (char c : text) {
    if (c == 'T' || c == 'F') out.push_back(c == 'T');
  }
  return out;
}

std::string boolText(bool b) { return b ? "true" : "false"; }

// The rain tables, transcribed as printed (days 1 to 9).
constexpr std::string_view kRain1d = "F F T T T F F F T";
const std::vector<std::pair<std::string, std::string_view>> kRain2d = {
    {"Montreal", "T F T F T F T F T"},
    {"Honolulu", "F F T T T F F F T"},
    {"New York", "F F F F T T T F F"},
    {"Tampa", "F T T T T T F F F"},
};

std::string rain1d() {
  Geer g = compile(corpusProgram("01_raining").source);
  auto want = row(kRain1d);
  std::string got;
  for (std::size_t day = 1; day <= want.size(); ++day) {
    // Day k of the table is tag k-1.
    Context at = parseContext("[day:" + std::to_string(day - 1) + "]");
    std::string v = eductive(g, at);
    expect(v == boolText(want[day - 1]), "day " + std::to_string(day) + " gave " + v);
    got += v == "true" ? "T " : "F ";
  }
  return got;
}

std::string rain2d() {
  Geer g = compile(corpusProgram("02_raining_cities").source);
  int checked = 0;
  for (const auto& [city, text] : kRain2d) {
    auto want = row(text);
    for (std::size_t day = 1; day <= want.size(); ++day) {
      Context at = parseContext("[city:\"" + city + "\", day:" + std::to_string(day - 1) + "]");
      std::string v = eductive(g, at);
      expect(v == boolText(want[day - 1]), city + " day " + std::to_string(day) + " gave " + v);
      ++checked;
    }
  }
  expect(checked == 36, "checked " + std::to_string(checked) + " entries");
  return std::to_string(checked) + " entries";
}

std::string coverageAndOracle() {
  expect(corpus().size() >= 20, "corpus has only " + std::to_string(corpus().size()) + " programs");
  RuleCoverage all;
  Rng rng(2024);
  int points = 0;
  for (const auto& p : corpus()) {
    Geer surface = compile(p.source, {false});
    Geer lowered = compile(p.source);
    NaiveEvaluator naive(surface, procs());
    for (const auto& ex : p.expectations) outcomeOf([&] { return naive.evalRoot(ex.at); });
    for (int i = 0; i < 50; ++i) {
      Context at = iplc::testing::randomPointIn(lowered, rng);
      std::string reference = outcomeOf([&] { return naive.evalRoot(at); });
      std::string demanded = eductive(lowered, at);
      expect(reference == demanded, p.name + " at " + at.text() + ": naive " + reference + ", eductive " + demanded);
      ++points;
    }
    all.merge(naive.coverage());
  }
  std::string missing;
  for (Rule r : all.missing()) missing += std::string(ruleName(r)) + " ";
  expect(missing.empty(), "rules never exercised: " + missing);
  return std::to_string(corpus().size()) + " programs, " + std::to_string(kRuleCount) + " rules, " +
         std::to_string(points) + " points";
}

std::string memoization() {
  Geer g = compile(corpusProgram("04_fib").source);
  Warehouse wh;
  EductiveEngine e(g, wh, procs());
  Context at = parseContext("[t:20]");
  Value v = e.evalRoot(at);
  std::int64_t a = 0, b = 1;
  for (int i = 0; i < 20; ++i) b = std::exchange(a, b) + b;
  expect(v == Value(a), "fib(20) gave " + v.text());
  auto demands = e.counters().demands;
  expect(demands <= 70, std::to_string(demands) + " demands");
  expect(wh.stats().recomputations == 0, "recomputations recorded");

  auto before = wh.stats();
  auto records = e.trace().records().size();
  expect(e.evalRoot(at) == v, "repeat changed the value");
  auto after = wh.stats();
  expect(after.computed == before.computed && after.hits == before.hits + 1, "repeat was not a single hit");
  const auto& trace = e.trace().records();
  expect(trace.size() == records + 2 && trace.back().event == DemandTrace::Event::Hit, "repeat trace is not issued+hit");
  return std::to_string(demands) + " demands, 0 recomputations";
}

/// Every combination of the domains' tags, kept when `keep` says so.
ContextSet bruteForce(const std::vector<TagDomain>& doms, const std::function<bool(const Context&)>& keep) {
  std::vector<Context::Bindings> partial{{}};
  for (const auto& d : doms) {
    std::vector<Context::Bindings> next;
    for (const auto& p : partial) {
      for (const auto& t : d.values()) {
        auto b = p;
        b.emplace(d.dimension(), t);
        next.push_back(std::move(b));
      }
    }
    partial = std::move(next);
  }
  ContextSet out;
  for (auto& b : partial) {
    Context c{std::move(b)};
    if (keep(c)) out.insert(c);
  }
  return out;
}

std::string lucxCalculus() {
  Rng rng(77);
  int viaProgram = 0;
  for (int i = 0; i < 200; ++i) {
    auto dims = uniformInt(rng, 1, 3);
    std::vector<TagDomain> doms;
    std::vector<std::int64_t> sizes, weights;
    std::string header;
    for (std::int64_t k = 0; k < dims; ++k) {
      std::string name(1, static_cast<char>('a' + k));
      auto size = uniformInt(rng, 1, 4);
      sizes.push_back(size);
      weights.push_back(uniformInt(rng, -2, 3));
      doms.push_back(TagDomain::range(DimensionName{name}, 0, size - 1));
      header += (k ? ", " : "") + name + " in 0.." + std::to_string(size - 1);
    }
    auto limit = uniformInt(rng, -2, 6);
    auto keep = [&](const Context& c) {
      std::int64_t s = 0;
      std::size_t k = 0;
      for (const auto& d : doms) s += weights[k++] * lookup(c, d.dimension()).asInt();
      return s <= limit;
    };
    ContextSet want = bruteForce(doms, keep);
    ContextSet got = box(doms, keep);
    expect(got == want, "box instance " + std::to_string(i) + " differs from brute force");

    if (i % 2 == 0) {
      // The same instance written as a program.
      std::string pred;
      for (std::int64_t k = 0; k < dims; ++k) {
        pred += (k ? " + " : "") + std::to_string(weights[static_cast<std::size_t>(k)]) + " * #" +
                std::string(1, static_cast<char>('a' + k));
      }
      std::string src = "Box[" + header + " | " + pred + " <= " + std::to_string(limit) + "]";
      std::string v = eductive(compile(src), {});
      expect(v == Value(want).text(), "program " + src + " gave " + v);
      ++viaProgram;
    }
  }
  for (int i = 0; i < 500; ++i) {
    ContextSet a = iplc::testing::randomContextSet(rng), b = iplc::testing::randomContextSet(rng);
    expect(setUnion(a, b) == setUnion(b, a), "union is not commutative");
    expect(setIntersect(a, b) == setIntersect(b, a), "intersection is not commutative");
    expect(setUnion(a, a) == a && setIntersect(a, a) == a, "not idempotent");
    expect(setDifference(a, a).empty(), "A minus A is not empty");
  }
  return "200 boxes (" + std::to_string(viaProgram) + " also as programs), 500 set pairs";
}

std::string transparency() {
  std::vector<std::pair<Geer, std::vector<Context>>> programs;
  for (const auto& p : corpus()) {
    Geer g = compile(p.source);
    std::vector<Context> points;
    for (const auto& ex : p.expectations) points.push_back(ex.at);
    if (points.empty()) points.push_back({});
    programs.emplace_back(std::move(g), std::move(points));
  }
  std::set<std::uint64_t> schedules;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimCluster cluster({Topology::parse("gim:1,dgt:2,dst:2,dwt:2"), seed});
    std::uint64_t fingerprint = 1469598103934665603ull;
    cluster.net().onDeliver([&](const std::string& to, const Message& m) {
      for (char c : to + std::string(msgKindName(m.kind))) fingerprint = (fingerprint ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    });
    for (const auto& [g, points] : programs) {
      for (const auto& at : points) {
        std::string local = eductive(g, at);
        std::string remote = outcomeOf([&] { return cluster.execute(g, at); });
        expect(local == remote, "seed " + std::to_string(seed) + " at " + at.text() + ": local " + local +
                                    ", distributed " + remote);
        ++runs;
      }
    }
    schedules.insert(fingerprint);
  }
  expect(schedules.size() == 10, "only " + std::to_string(schedules.size()) + " distinct interleavings");
  return std::to_string(runs) + " demands over 10 distinct interleavings";
}

std::string peerStore() {
  SimNetwork net(5);
  auto box = std::make_unique<Mailbox>();
  Mailbox* client = box.get();
  net.attach(std::move(box), "client");
  Dst::Options options{Timing::simulated(), std::nullopt, false};
  std::string a = net.attach(std::make_unique<Dst>(options), "dstA");
  std::string b = net.attach(std::make_unique<Dst>(options), "dstB");
  for (const auto& d : {a, b}) {
    client->post(d, Message(MsgKind::PeerAnnounce).set("dst", joinList({a, b})).set("dwt", "").set("dgt", ""));
  }
  auto ask = [&](const std::string& to, Message m) {
    std::string id = client->post(to, std::move(m));
    std::optional<Message> reply;
    net.runUntil([&] { return (reply = client->take(id)).has_value(); }, 10'000);
    expect(reply.has_value(), "no answer from " + to + " (hung)");
    return *reply;
  };
  std::string onA = DemandKey{"p", "x", parseContext("[t:1]")}.text();
  std::string onB = DemandKey{"p", "y", parseContext("[t:2]")}.text();
  expect(ask(a, Message(MsgKind::StorePut).set("key", onA).set("value", "11")).kind == MsgKind::Ack, "put via A");
  expect(ask(b, Message(MsgKind::StorePut).set("key", onB).set("value", "22")).kind == MsgKind::Ack, "put via B");
  Message hit = ask(b, Message(MsgKind::StoreGet).set("key", onA));
  expect(hit.kind == MsgKind::StoreHit && hit.get("value") == "11", "get via B did not return A's value");

  expect(ask(a, systemCommand("", "Shutdown")).kind == MsgKind::Ack, "A did not stop");
  expect(!net.alive(a), "A still running");
  Message held = ask(b, Message(MsgKind::StoreGet).set("key", onB));
  expect(held.kind == MsgKind::StoreHit && held.get("value") == "22", "B lost its own key");
  std::int64_t t0 = net.now();
  Message lost = ask(b, Message(MsgKind::StoreGet).set("key", onA));
  expect(lost.kind == MsgKind::StoreMiss, "A-only key was not reported NotFound");
  return "NotFound after " + std::to_string(net.now() - t0) + " ticks";
}

std::string faultTolerance() {
  Geer g = compile(corpusProgram("20_procedures").source);
  Context at = parseContext("[t:60]");
  std::int64_t squares = 0;
  for (std::int64_t k = 0; k <= 60; ++k) squares += k * k;

  Warehouse wh;
  EductiveEngine probe(g, wh, procs());
  expect(probe.evalRoot(at) == Value(squares), "local value is wrong");
  auto total = probe.counters().proceduralDemands;
  expect(total >= 50, "only " + std::to_string(total) + " procedural demands");

  SimCluster cluster({Topology::parse("gim:1,dgt:2,dst:2,dwt:2"), 42});
  auto half = (total + 1) / 2;
  auto victim = cluster.killBusyWorkerAfter(half);
  Value v = cluster.execute(g, at);
  expect(!victim->empty(), "no worker was killed");
  expect(v == Value(squares), "distributed value " + v.text());
  auto redispatched = cluster.stat(TierKind::DST, "redispatched");
  expect(redispatched >= 1, "no re-dispatch recorded");
  return std::to_string(total) + " procedural demands, killed " + *victim + " after " + std::to_string(half) +
         ", " + std::to_string(redispatched) + " re-dispatch(es)";
}

std::string geerDeterminism() {
  Rng rng(9);
  int permutations = 0;
  for (const auto& p : corpus()) {
    std::string once = geerSerialize(compile(p.source));
    expect(once == geerSerialize(compile(p.source)), p.name + " differs between runs");
    auto parsed = parseSource(p.source);
    for (int k = 0; k < 4; ++k) {
      auto decls = parsed.decls;
      std::shuffle(decls.begin(), decls.end(), rng);
      expect(once == geerSerialize(compile(printProgram(parsed.root, decls))), p.name + " depends on declaration order");
      ++permutations;
    }
    expect(geerSerialize(geerParse(once)) == once, p.name + ": parse then serialize changed the bytes");
  }
  return std::to_string(corpus().size()) + " programs, " + std::to_string(permutations) + " permutations";
}

struct Criterion {
  int number;
  std::string name;
  double limitSeconds;
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "1D rain table reproduction", 1, rain1d},
      {2, "2D rain table reproduction", 1, rain2d},
      {3, "rule coverage and naive/eductive equivalence", 30, coverageAndOracle},
      {4, "memoization bound on fib", 1, memoization},
      {5, "context calculus against brute force", 10, lucxCalculus},
      {6, "distribution transparency", 60, transparency},
      {7, "peer-to-peer store", 5, peerStore},
      {8, "fault tolerance", 30, faultTolerance},
      {9, "GEER determinism", 5, geerDeterminism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const Failed& f) {
      ok = false;
      detail = f.why;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("unexpected error: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && seconds >= c.limitSeconds) {
      ok = false;
      detail += "; too slow";
    }
    failures += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%.3f s, limit %.0f s): %s\n", ok ? "PASS" : "FAIL", c.number, c.name.c_str(),
                seconds, c.limitSeconds, detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
