#include <gtest/gtest.h>

#include <atomic>
#include <numeric>

#include "mvtlab/harness.hpp"
#include "mvtlab/report.hpp"

namespace mvt {
namespace {

ExperimentConfig small_config() {
  auto cfg = preset("setting2-linear");
  cfg.repetitions = 4;
  cfg.traffic = {1000, 10000, 100000};
  return cfg;
}

TEST(ExperimentTest, BuildsAndChecksArray) {
  const Experiment e(small_config());
  EXPECT_EQ(e.array().row_count(), 9u);
  EXPECT_EQ(e.population_size(), 8u);
  const auto plan = e.evolution_plan(9000);
  ASSERT_EQ(plan.size(), 8u);
  EXPECT_EQ(plan[0].size(), 9u);

  auto bad = small_config();
  bad.array = "L16";
  EXPECT_THROW(Experiment{bad}, std::invalid_argument);
  bad = small_config();
  bad.traffic = {50, 1000};
  EXPECT_THROW(Experiment{bad}, std::invalid_argument);
}

TEST(ExperimentTest, MixedPresetArrayMatchesSpace) {
  const Experiment e(preset("mixed-linear"));
  EXPECT_EQ(e.array().row_count(), 36u);
  EXPECT_EQ(e.population_size(), 22u);
}

TEST(ExperimentTest, EvaluatorSeeds) {
  const Experiment e(small_config());
  EXPECT_NE(e.evaluator_seed(0), e.evaluator_seed(1));
  EXPECT_EQ(e.evaluator_for(2), e.evaluator_for(2));
  auto cfg = small_config();
  cfg.fixed_evaluator = true;
  const Experiment fixed(cfg);
  EXPECT_EQ(fixed.evaluator_for(0), fixed.evaluator_for(3));
  EXPECT_NE(e.task_seed(0, 1, 1), e.task_seed(0, 1, 2));
  EXPECT_NE(e.task_seed(0, 1, 1), e.task_seed(1, 0, 1));
}

TEST(TaguchiArmTest, ZeroVarianceLandscape) {
  const Evaluator ev(SearchSpace({3, 3, 3, 3}), EvaluatorMode::kLinear, 0.05);
  Rng rng(1);
  const auto r = run_taguchi_arm(bundled_array("L9"), ev, 90000, rng);
  EXPECT_DOUBLE_EQ(r.predict_cr, 0.05);
  EXPECT_DOUBLE_EQ(r.candidate_cr, 0.05);
}

TEST(TaguchiArmTest, HugeTrafficFindsLinearOptimum) {
  // At 1e9 impressions per row the sampling error is far below the effect sizes.
  const auto ev = sample_evaluator(SearchSpace({3, 3, 3, 3}), EvaluatorMode::kLinear, WeightConfig{}, 8);
  Rng rng(2);
  const auto r = run_taguchi_arm(bundled_array("L9"), ev, 9'000'000'000, rng);
  EXPECT_DOUBLE_EQ(r.predict_cr, brute_force_best(ev).second);
  EXPECT_LE(r.candidate_cr, r.predict_cr);
}

TEST(TaguchiArmTest, MismatchIsRejected) {
  const auto ev = sample_evaluator(SearchSpace({3, 3, 3}), EvaluatorMode::kLinear, WeightConfig{}, 8);
  Rng rng(2);
  EXPECT_THROW(run_taguchi_arm(bundled_array("L9"), ev, 9000, rng), std::invalid_argument);
}

TEST(RunningAverageTest, SingleRowTaguchi) {
  const OrthogonalArray one{{2, 2}, {{1, 0}}};
  const auto ev = sample_evaluator(SearchSpace({2, 2}), EvaluatorMode::kLinear, WeightConfig{}, 4);
  for (Count checkpoint : {1, 17, 1000}) {
    EXPECT_DOUBLE_EQ(taguchi_running_average(one, ev, checkpoint), ev.true_cr(Candidate{1, 0}));
  }
}

TEST(RunningAverageTest, TaguchiFullRotationIsArrayMean) {
  const auto a = bundled_array("L9");
  const auto ev = sample_evaluator(SearchSpace({3, 3, 3, 3}), EvaluatorMode::kLinear, WeightConfig{}, 4);
  double mean = 0.0;
  for (std::size_t r = 0; r < 9; ++r) mean += ev.true_cr(a.row_candidate(r)) / 9.0;
  EXPECT_NEAR(taguchi_running_average(a, ev, 9000), mean, 1e-15);
  EXPECT_NEAR(taguchi_running_average(a, ev, 9'000'000), mean, 1e-15);
}

TEST(RunningAverageTest, EvolutionFirstGenerationIsInitialMean) {
  const SearchSpace space({3, 3, 3, 3});
  const auto ev = sample_evaluator(space, EvaluatorMode::kLinear, WeightConfig{}, 6);
  const auto plan = allocate_evolution(72'000, 8, 9);
  Rng rng(3);
  const auto run = run_evolution(space, ev, plan, EvolutionConfig{}, rng);
  double initial = 0.0;
  for (const auto& c : init_population(space)) initial += ev.true_cr(c) / 8.0;
  EXPECT_NEAR(evolution_running_average(run, plan, ev, 9000), initial, 1e-15);
  EXPECT_NEAR(evolution_running_average(run, plan, ev, 900), initial, 1e-15);
  EXPECT_THROW(evolution_running_average(run, plan, ev, 72'001), std::invalid_argument);
}

TEST(RunningAverageTest, EvolutionFullRunWeightsEveryServedSlot) {
  const SearchSpace space({3, 3, 3, 3});
  const auto ev = sample_evaluator(space, EvaluatorMode::kLinear, WeightConfig{}, 6);
  const auto plan = allocate_evolution(100'003, 8, 9);
  Rng rng(4);
  const auto run = run_evolution(space, ev, plan, EvolutionConfig{}, rng);
  double weighted = 0.0;
  Count n = 0;
  for (const auto& rec : run.generations)
    for (std::size_t i = 0; i < rec.population.size(); ++i) {
      weighted += static_cast<double>(rec.served[i]) * ev.true_cr(rec.population[i].genome);
      n += rec.served[i];
    }
  EXPECT_NEAR(evolution_running_average(run, plan, ev, 100'003), weighted / static_cast<double>(n), 1e-15);
}

TEST(ParallelForTest, VisitsEveryTaskOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelForTest, RethrowsFailure) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(RunComparisonTest, ShapeAndOrdering) {
  const Experiment e(small_config());
  const auto series = run_comparison(e, 2);
  ASSERT_EQ(series.traffic.size(), 3u);
  ASSERT_EQ(series.methods.size(), 3u);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t m = 0; m < 3; ++m) {
      const auto& iv = series.values[t][m];
      EXPECT_LE(iv.low, iv.mean);
      EXPECT_LE(iv.mean, iv.high);
      EXPECT_EQ(series.samples[t][m].size(), 4u);
    }
}

TEST(RunComparisonTest, ByteIdenticalAcrossThreadCounts) {
  const Experiment e(small_config());
  const auto one = render_csv(run_comparison(e, 1));
  const auto many = render_csv(run_comparison(e, 8));
  EXPECT_EQ(one, many);
  EXPECT_EQ(one, render_csv(run_comparison(Experiment(small_config()), 3)));
}

TEST(RunComparisonTest, SeedChangesOutput) {
  auto cfg = small_config();
  const auto a = render_csv(run_comparison(Experiment(cfg), 0));
  cfg.seed += 1;
  EXPECT_NE(a, render_csv(run_comparison(Experiment(cfg), 0)));
}

TEST(DuringCurveTest, TaguchiIsFlatUnderFullRotations) {
  auto cfg = preset("during-experiment");
  cfg.repetitions = 3;
  cfg.traffic = {36'000, 360'000, 3'600'000};
  const Experiment e(cfg);
  const auto series = run_during_experiment_curve(e, 0);
  for (std::size_t rep = 0; rep < 3; ++rep) {
    const double first = series.samples_at(0, Method::kTaguchi)[rep];
    for (std::size_t t = 1; t < 3; ++t) EXPECT_NEAR(series.samples_at(t, Method::kTaguchi)[rep], first, 1e-12);
  }
  EXPECT_THROW(series.method_index(Method::kTaguchiPredict), std::out_of_range);
}

}  // namespace
}  // namespace mvt
