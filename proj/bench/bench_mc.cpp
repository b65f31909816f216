// Serial reference versus OpenMP path loop for the saddle-suite payoff samples.

#include <benchmark/benchmark.h>

#include "scgame/boundaries.hpp"
#include "scgame/game_sim.hpp"
#include "scgame/grid.hpp"
#include "scgame/vi_solver.hpp"

namespace {

struct Fixture {
  scg::GameSpec spec = scg::benchmark_spec(1, 1, 0.05, 0.4, {0.1, 2.0, 1.0});
  scg::GameCurves curves;
  std::vector<scg::StrategyPair> pairs;

  Fixture() {
    scg::PenalizationParams p;
    p.eps = p.delta = 1e-6;
    const auto s = scg::solve_penalized(spec, scg::build_grid(spec, {101, 401, 0.0, 4.0}), p);
    curves = scg::curves_from(scg::extract_boundaries(s));
    pairs = {{},
             {"no control", {}, {scg::ControlRule::Kind::NoControl}},
             {"reflect at b+0.1", {}, {scg::ControlRule::Kind::ReflectAtShifted, 0.1}}};
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_PayoffSerial(benchmark::State& state) {
  const auto& f = fixture();
  const scg::SimConfig cfg{static_cast<std::size_t>(state.range(0)), 200, 1, false};
  for (auto _ : state)
    benchmark::DoNotOptimize(scg::payoff_samples_serial(f.spec, f.curves, f.pairs, 0.0, 1.0, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PayoffParallel(benchmark::State& state) {
  const auto& f = fixture();
  const scg::SimConfig cfg{static_cast<std::size_t>(state.range(0)), 200, 1, false};
  for (auto _ : state) benchmark::DoNotOptimize(scg::payoff_samples(f.spec, f.curves, f.pairs, 0.0, 1.0, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_PayoffSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PayoffParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
