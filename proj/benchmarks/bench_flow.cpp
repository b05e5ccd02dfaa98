#include "nilflow/diagnostics.hpp"
#include "nilflow/flow_rhs.hpp"
#include "nilflow/initial_data.hpp"
#include "nilflow/integrator.hpp"

#include <benchmark/benchmark.h>

namespace {

nilflow::FlowState bench_state(int n) {
  nilflow::InitialDataParams p;
  p.seed = 3;
  return nilflow::random_state(nilflow::Grid(n, 6.283185307179586), nilflow::LieStructure::heisenberg(), p);
}

void BM_Rhs(benchmark::State& state) {
  const auto s = bench_state(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = nilflow::rhs(s);
    benchmark::DoNotOptimize(r.G.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rhs)->Arg(64)->Arg(128)->Arg(256);

void BM_Step(benchmark::State& state) {
  const auto s0 = bench_state(static_cast<int>(state.range(0)));
  nilflow::StepController ctrl;
  ctrl.fixed_dt = nilflow::cfl_limit(s0, ctrl.cfl_sigma);
  for (auto _ : state) {
    auto s = nilflow::step(s0, ctrl);
    benchmark::DoNotOptimize(s.g.data());
  }
}
BENCHMARK(BM_Step)->Arg(64)->Arg(128)->Arg(256);

void BM_Diagnostics(benchmark::State& state) {
  const auto s = bench_state(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = nilflow::diagnostics_record(s);
    benchmark::DoNotOptimize(r.s_b.sup);
  }
}
BENCHMARK(BM_Diagnostics)->Arg(64)->Arg(128)->Arg(256);

}  // namespace
BENCHMARK_MAIN();
