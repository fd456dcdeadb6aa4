#include <benchmark/benchmark.h>

#include "todx/runner.hpp"

using namespace todx;

namespace {

std::vector<GenParams> batch(std::size_t n) {
  std::vector<GenParams> ps;
  for (std::uint64_t s = 0; s < n; ++s) {
    GenParams p;
    p.seed = s;
    p.queries = 50;
    ps.push_back(p);
  }
  return ps;
}

void BM_BatchSerial(benchmark::State& st) {
  auto ps = batch(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(run_batch_serial(ps, false));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_BatchParallel(benchmark::State& st) {
  auto ps = batch(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(run_batch_parallel(ps, false));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void run_family(benchmark::State& st, const char* family, IndexMode mode) {
  auto script = bench_script(family, static_cast<unsigned>(st.range(0)));
  RunOptions opt;
  opt.modes = {mode};
  for (auto _ : st) {
    benchmark::DoNotOptimize(run_script(script, opt));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SwapOff(benchmark::State& st) { run_family(st, "swap", IndexMode::Off); }
void BM_SwapOn(benchmark::State& st) { run_family(st, "swap", IndexMode::PerEquality); }
void BM_SwapShared(benchmark::State& st) { run_family(st, "swap", IndexMode::SharedByLhs); }
void BM_PolyOff(benchmark::State& st) { run_family(st, "poly", IndexMode::Off); }
void BM_PolyShared(benchmark::State& st) { run_family(st, "poly", IndexMode::SharedByLhs); }

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SwapOff)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SwapOn)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SwapShared)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolyOff)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolyShared)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
