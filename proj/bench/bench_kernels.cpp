// Step kernels (reference vs row kernel, serial vs OpenMP) and episode batches
// (serial vs OpenMP fan-out).
#include <benchmark/benchmark.h>
#include <omp.h>

#include "lifemodel/agents.hpp"
#include "lifemodel/experiments.hpp"

namespace {

using namespace lifemodel;

Grid bench_grid(int side) {
  Rng rng(7);
  return random_start(side, side, 0.5, rng);
}

void BM_StepReference(benchmark::State& state) {
  const Grid g = bench_grid(static_cast<int>(state.range(0)));
  const RuleTable gol = rule_table_of(BuiltinRule::game_of_life());
  for (auto _ : state) benchmark::DoNotOptimize(step_grid_reference(g, gol));
  state.SetItemsProcessed(state.iterations() * g.cell_count());
}

void step_kernel(benchmark::State& state, int threads) {
  const Grid g = bench_grid(static_cast<int>(state.range(0)));
  Grid out = g;
  const RuleTable gol = rule_table_of(BuiltinRule::game_of_life());
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  for (auto _ : state) benchmark::DoNotOptimize(step_grid_into(g, gol, out));
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * g.cell_count());
}

void BM_StepSerial(benchmark::State& state) { step_kernel(state, 1); }
void BM_StepParallel(benchmark::State& state) { step_kernel(state, omp_get_num_procs()); }

void episode_batch(benchmark::State& state, bool parallel) {
  ExperimentSpec spec;
  spec.horizon = 20;
  spec.repeats = static_cast<int>(state.range(0));
  spec.parallel = parallel;
  spec.agent.budgetIterations = 10;
  const RuleTable truth = spec.truth();
  for (auto _ : state) {
    std::vector<int> finals(spec.repeats);
    for_each_run(spec.repeats, parallel, [&](int run) {
      RheaAgent agent(spec.agent, derive_seed(spec.master_seed, run, kAgentStream));
      const GameState start = start_state(spec, derive_seed(spec.master_seed, run, kStartStream));
      finals[run] = run_episode(start, agent, truth, truth, spec.horizon).scores.back();
    });
    benchmark::DoNotOptimize(finals);
  }
}

void BM_EpisodesSerial(benchmark::State& state) { episode_batch(state, false); }
void BM_EpisodesParallel(benchmark::State& state) { episode_batch(state, true); }

}  // namespace

BENCHMARK(BM_StepReference)->Arg(30)->Arg(128)->Arg(512);
BENCHMARK(BM_StepSerial)->Arg(30)->Arg(128)->Arg(512)->Arg(2048);
BENCHMARK(BM_StepParallel)->Arg(30)->Arg(128)->Arg(512)->Arg(2048);
BENCHMARK(BM_EpisodesSerial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EpisodesParallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
