#include <benchmark/benchmark.h>

#include "beamre/channel.hpp"
#include "beamre/de.hpp"
#include "beamre/mm.hpp"
#include "beamre/powerctl.hpp"
#include "beamre/surrogate.hpp"

using namespace beamre;

namespace {

SystemParams bench_params(int m, int k) {
  SystemParams p;
  p.M = m;
  p.K = k;
  p.N.assign(k, 2);
  p.W = 1e7;
  p.sigma2 = dbm_to_watt(-105.0);
  p.xi = 5.0;
  p.Pc = 1.0;
  p.Ps = 10.0;
  p.Pmax = 10.0;
  p.beta = 0.5;
  return p;
}

}  // namespace

static void BM_DeFixedPoint(benchmark::State& state) {
  const SystemParams p = bench_params(static_cast<int>(state.range(0)), 4);
  const ChannelStats stats = synth_coupling(p, -120.0, 0.6, 0.15, 1, 0.5);
  const PowerAllocation a = PowerAllocation::uniform(p, p.Pmax);
  for (auto _ : state) {
    const DeState st = de_fixed_point(stats, a, 0, p.sigma2, 1e-8, 1000);
    benchmark::DoNotOptimize(st.gamma);
  }
}
BENCHMARK(BM_DeFixedPoint)->Arg(16)->Arg(64)->Arg(128);

static void BM_Waterfill(benchmark::State& state) {
  const SystemParams p = bench_params(static_cast<int>(state.range(0)), 4);
  const ChannelStats stats = synth_coupling(p, -120.0, 0.6, 0.15, 1, 0.5);
  SolverConfig cfg;
  const PowerAllocation anchor = PowerAllocation::uniform(p, p.Pmax);
  const auto states = de_states_all(stats, anchor, p, cfg);
  const Surrogate sur = make_surrogate(stats, anchor, p, states);
  for (auto _ : state) {
    const WaterfillResult r = waterfill(stats, sur, p.Pmax / 2, cfg);
    benchmark::DoNotOptimize(r.mu_star);
  }
}
BENCHMARK(BM_Waterfill)->Arg(16)->Arg(64);

static void BM_MmSolve(benchmark::State& state) {
  const SystemParams p = bench_params(static_cast<int>(state.range(0)), 4);
  const ChannelStats stats = synth_coupling(p, -120.0, 0.6, 0.15, 1, 0.5);
  SolverConfig cfg;
  for (auto _ : state) {
    const MmState st = mm_solve(stats, p, cfg);
    benchmark::DoNotOptimize(st.re_trace);
  }
}
BENCHMARK(BM_MmSolve)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
