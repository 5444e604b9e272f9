#include <benchmark/benchmark.h>

#include "mvtlab/evolution.hpp"
#include "mvtlab/harness.hpp"
#include "mvtlab/simstats.hpp"
#include "mvtlab/taguchi.hpp"

namespace {

using namespace mvt;

void BM_ProbBeatsControl(benchmark::State& state) {
  // Posteriors of the size seen at the given traffic per candidate.
  const double n = static_cast<double>(state.range(0));
  const BetaPosterior control{5 + 0.050 * n, 95 + 0.950 * n};
  const BetaPosterior candidate{5 + 0.052 * n, 95 + 0.948 * n};
  for (auto _ : state) benchmark::DoNotOptimize(prob_beats_control(candidate, control));
}
BENCHMARK(BM_ProbBeatsControl)->RangeMultiplier(100)->Range(100, 1'000'000);

void BM_ProbBeatsControlSaturated(benchmark::State& state) {
  const BetaPosterior control{5005, 95095};
  const BetaPosterior candidate{8000, 92000};
  for (auto _ : state) benchmark::DoNotOptimize(prob_beats_control(candidate, control));
}
BENCHMARK(BM_ProbBeatsControlSaturated);

void BM_SimulateConversions(benchmark::State& state) {
  Rng rng(1);
  const Count n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_conversions(0.05, n, rng));
}
BENCHMARK(BM_SimulateConversions)->RangeMultiplier(100)->Range(100, 100'000'000);

void BM_TaguchiArm(benchmark::State& state) {
  const Experiment experiment(preset("mixed-linear"));
  const Evaluator ev = experiment.evaluator_for(0);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(run_taguchi_arm(experiment.array(), ev, 1'000'000, rng));
}
BENCHMARK(BM_TaguchiArm);

void BM_EvolutionRun(benchmark::State& state) {
  const Experiment experiment(preset(state.range(0) == 0 ? "setting2-linear" : "mixed-linear"));
  const Evaluator ev = experiment.evaluator_for(0);
  const TrafficPlan plan = experiment.evolution_plan(1'000'000);
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_evolution(experiment.space(), ev, plan, experiment.config().evolution, rng));
  }
}
BENCHMARK(BM_EvolutionRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ValidateArray(benchmark::State& state) {
  const OrthogonalArray a = bundled_array("L36");
  for (auto _ : state) benchmark::DoNotOptimize(validate(a));
}
BENCHMARK(BM_ValidateArray);

}  // namespace

BENCHMARK_MAIN();
