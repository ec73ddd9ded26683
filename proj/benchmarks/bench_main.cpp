#include <benchmark/benchmark.h>

#include "corpus.hpp"
#include "iplc/compiler.hpp"
#include "iplc/eval.hpp"
#include "iplc/tiers/cluster.hpp"

using namespace iplc;
using iplc::testing::corpusProgram;

namespace {

const ProcedureRegistry& procs() {
  static const ProcedureRegistry r = standardProcedures();
  return r;
}

const Geer& fib() {
  static const Geer g = compile(corpusProgram("04_fib").source);
  return g;
}

Context atT(std::int64_t t) { return Context{{{DimensionName{"t"}, Tag{t}}}}; }

void compileCorpus(benchmark::State& state) {
  std::vector<std::string> sources;
  for (const auto& p : iplc::testing::corpus()) sources.push_back(p.source);
  for (auto _ : state) {
    for (const auto& s : sources) benchmark::DoNotOptimize(compile(s));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sources.size()));
}
BENCHMARK(compileCorpus);

void naiveFib(benchmark::State& state) {
  NaiveEvaluator n(fib(), procs());
  for (auto _ : state) benchmark::DoNotOptimize(n.evalRoot(atT(state.range(0))));
}
BENCHMARK(naiveFib)->DenseRange(8, 16, 4);

void eductiveFib(benchmark::State& state) {
  for (auto _ : state) {
    Warehouse wh;
    EductiveEngine e(fib(), wh, procs());
    e.setTracing(false);
    benchmark::DoNotOptimize(e.evalRoot(atT(state.range(0))));
  }
}
BENCHMARK(eductiveFib)->DenseRange(8, 16, 4)->Arg(64);

void warmWarehouseHit(benchmark::State& state) {
  Warehouse wh;
  EductiveEngine e(fib(), wh, procs());
  e.setTracing(false);
  e.evalRoot(atT(40));
  for (auto _ : state) benchmark::DoNotOptimize(e.evalRoot(atT(40)));
}
BENCHMARK(warmWarehouseHit);

void frameRoundTrip(benchmark::State& state) {
  Message m(MsgKind::StorePut);
  m.set("id", "sim:dgt1#42").set("key", "abc:\"x\"@[t:12,s:\"Montreal\"]").set("value", "832040").set("job", "sim:dst1#7");
  FrameReader reader;
  for (auto _ : state) benchmark::DoNotOptimize(reader.feed(frame(m)));
}
BENCHMARK(frameRoundTrip);

void clusterExecute(benchmark::State& state) {
  Geer g = compile(corpusProgram("20_procedures").source);
  for (auto _ : state) {
    SimCluster c({Topology::parse("gim:1,dgt:2,dst:2,dwt:2"), 1});
    benchmark::DoNotOptimize(c.execute(g, atT(state.range(0))));
  }
}
BENCHMARK(clusterExecute)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
