#include <benchmark/benchmark.h>

#include "dexp/depgraph.h"
#include "dexp/extlibs/bundle.h"
#include "dexp/harness.h"
#include "dexp/preview.h"
#include "dexp/refeval.h"
#include "dexp/syntax.h"

namespace {

const char* kListProgram =
    "let xs = list.range(0, 200)\n"
    "let ys = xs.map(fun x -> math.mul(x, x))\n"
    "ys.skip(10).take(15).sum\n"
    "xs.map(fun y -> math.add(y, 1)).count\n";

std::shared_ptr<const dexp::LibrarySet> libs() {
  static auto lib = [] {
    dexp::LibraryConfig cfg;
    cfg.asset_dir = DEXP_ASSET_DIR;
    return dexp::make_library(cfg);
  }();
  return lib;
}

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dexp::parse(kListProgram));
}
BENCHMARK(BM_Parse);

void BM_ReferenceEvaluate(benchmark::State& state) {
  auto p = dexp::parse(kListProgram);
  for (auto _ : state) benchmark::DoNotOptimize(dexp::evaluate(p, *libs()));
}
BENCHMARK(BM_ReferenceEvaluate);

void BM_BindWarmCache(benchmark::State& state) {
  dexp::LiveState live;
  live.roots = libs()->roots();
  dexp::rebind(live, kListProgram);
  for (auto _ : state) benchmark::DoNotOptimize(dexp::rebind(live, kListProgram));
}
BENCHMARK(BM_BindWarmCache);

void BM_PreviewsCold(benchmark::State& state) {
  for (auto _ : state) {
    dexp::LiveState live;
    live.roots = libs()->roots();
    auto r = dexp::rebind(live, kListProgram);
    dexp::PreviewCache cache;
    benchmark::DoNotOptimize(dexp::command_previews(r.binding, cache, *libs()));
  }
}
BENCHMARK(BM_PreviewsCold);

void BM_PreviewsAfterEdit(benchmark::State& state) {
  dexp::LiveState live;
  live.roots = libs()->roots();
  dexp::PreviewCache cache;
  auto first = dexp::rebind(live, kListProgram);
  dexp::command_previews(first.binding, cache, *libs());
  std::string edited = std::string(kListProgram) + "ys.take(3)\n";
  for (auto _ : state) {
    auto r = dexp::rebind(live, edited);
    benchmark::DoNotOptimize(dexp::command_previews(r.binding, cache, *libs()));
  }
}
BENCHMARK(BM_PreviewsAfterEdit);

void BM_ReplayImageScript(benchmark::State& state) {
  auto script = dexp::EditScript::load(std::string(DEXP_ASSET_DIR) +
                                       "/scripts/image_edits.json");
  auto strategy = static_cast<dexp::Strategy>(state.range(0));
  for (auto _ : state) {
    auto counter = std::make_shared<dexp::CountingLibrary>(libs());
    benchmark::DoNotOptimize(dexp::replay(script, strategy, counter));
  }
  state.SetLabel(std::string(dexp::strategy_name(strategy)));
}
BENCHMARK(BM_ReplayImageScript)
    ->Arg(static_cast<int>(dexp::Strategy::kCbv))
    ->Arg(static_cast<int>(dexp::Strategy::kLazy))
    ->Arg(static_cast<int>(dexp::Strategy::kLive))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
