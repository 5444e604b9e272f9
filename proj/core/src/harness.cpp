#include "mvtlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mvtlab/random.hpp"

namespace mvt {

namespace {

// Arm tags for seed derivation.
constexpr int kTaguchiArm = 1;
constexpr int kEvolutionArm = 2;
constexpr std::uint64_t kEvaluatorTag = 0x45564c;

/// Like allocate_taguchi, but tolerates fewer impressions than slots.
std::vector<Count> rotation_split(Count total, std::size_t slots) {
  std::vector<Count> out(slots, 0);
  const auto n = static_cast<Count>(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    out[s] = total / n + (static_cast<Count>(s) < total % n ? 1 : 0);
  }
  return out;
}

ResultSeries make_series(const Experiment& experiment, std::vector<Method> methods, std::string y_label) {
  const auto& cfg = experiment.config();
  ResultSeries series;
  series.title = cfg.name;
  series.y_label = std::move(y_label);
  series.traffic = cfg.traffic;
  series.methods = std::move(methods);
  series.samples.assign(cfg.traffic.size(),
                        std::vector<std::vector<double>>(series.methods.size(),
                                                         std::vector<double>(static_cast<std::size_t>(cfg.repetitions))));
  return series;
}

void summarise(ResultSeries& series) {
  series.values.clear();
  for (const auto& per_method : series.samples) {
    std::vector<Interval> row;
    for (const auto& values : per_method) {
      if (values.size() >= 2) {
        row.push_back(aggregate_runs(values));
      } else {
        row.push_back({values.front(), values.front(), values.front()});
      }
    }
    series.values.push_back(std::move(row));
  }
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kEvolution:
      return "evolution";
    case Method::kTaguchiPredict:
      return "taguchi-predict";
    case Method::kTaguchiCandidate:
      return "taguchi-candidate";
    case Method::kTaguchi:
      return "taguchi";
  }
  return "unknown";
}

std::size_t ResultSeries::method_index(Method m) const {
  const auto it = std::find(methods.begin(), methods.end(), m);
  if (it == methods.end()) throw std::out_of_range("series has no method " + std::string(to_string(m)));
  return static_cast<std::size_t>(it - methods.begin());
}

OrthogonalArray build_array(const ExperimentConfig& config) {
  OrthogonalArray array = resolve_array(config.array);
  for (const auto& [col2, col3] : config.merges) array = merge_columns(array, col2, col3);
  return array;
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)), array_(build_array(config_)) {
  config_.validate();
  const ValidationReport report = validate(array_);
  if (!report.valid()) throw std::invalid_argument("experiment array is invalid:\n" + report.summary());
  require_matches(array_, config_.space);
  const Count smallest = config_.traffic.front();
  if (smallest < static_cast<Count>(array_.row_count())) {
    throw std::invalid_argument("smallest traffic value cannot cover every array row");
  }
  const Count slots = static_cast<Count>(population_size() + 1) * config_.evolution.generations;
  if (smallest < slots) {
    throw std::invalid_argument("smallest traffic value cannot give every evolution slot an impression");
  }
}

std::size_t Experiment::population_size() const { return one_gene_variants(config_.space).size(); }

std::uint64_t Experiment::evaluator_seed(int repetition) const {
  if (config_.fixed_evaluator) return derive_seed(config_.seed, {kEvaluatorTag});
  return derive_seed(config_.seed, {kEvaluatorTag, static_cast<std::uint64_t>(repetition)});
}

Evaluator Experiment::evaluator_for(int repetition) const {
  return sample_evaluator(config_.space, config_.mode, config_.weights, evaluator_seed(repetition));
}

std::uint64_t Experiment::task_seed(int repetition, std::size_t traffic_index, int arm) const {
  return derive_seed(config_.seed, {static_cast<std::uint64_t>(repetition), traffic_index,
                                    static_cast<std::uint64_t>(arm)});
}

TrafficPlan Experiment::evolution_plan(Count total_traffic) const {
  return allocate_evolution(total_traffic, config_.evolution.generations,
                            static_cast<Count>(population_size() + 1));
}

TaguchiArmResult run_taguchi_arm(const OrthogonalArray& array, const Evaluator& evaluator, Count total_traffic,
                                 Rng& rng) {
  require_matches(array, evaluator.space());
  const auto impressions = allocate_taguchi(total_traffic, static_cast<Count>(array.row_count()));
  std::vector<double> scores(array.row_count());
  for (std::size_t r = 0; r < array.row_count(); ++r) {
    const Count conversions = simulate_conversions(evaluator.true_cr(array.row_candidate(r)), impressions[r], rng);
    scores[r] = static_cast<double>(conversions) / static_cast<double>(impressions[r]);
  }
  TaguchiArmResult out;
  out.predicted = predict_best(array, scores);
  out.best_row = best_tested(array, scores);
  out.predict_cr = evaluator.true_cr(out.predicted);
  out.candidate_cr = evaluator.true_cr(out.best_row);
  return out;
}

EvolutionArmResult run_evolution_arm(const Experiment& experiment, const Evaluator& evaluator, Count total_traffic,
                                     Rng& rng) {
  EvolutionArmResult out;
  out.run = run_evolution(experiment.space(), evaluator, experiment.evolution_plan(total_traffic),
                          experiment.config().evolution, rng);
  out.winner_cr = evaluator.true_cr(out.run.winner);
  return out;
}

void parallel_for(std::size_t tasks, unsigned jobs, const std::function<void(std::size_t)>& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(tasks, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks);
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

ResultSeries run_comparison(const Experiment& experiment, unsigned jobs) {
  const auto& cfg = experiment.config();
  ResultSeries series = make_series(
      experiment, {Method::kEvolution, Method::kTaguchiPredict, Method::kTaguchiCandidate}, "true conversion rate");
  const auto reps = static_cast<std::size_t>(cfg.repetitions);

  // Each task writes only its own sample slots, so completion order cannot
  // affect the result.
  parallel_for(cfg.traffic.size() * reps, jobs, [&](std::size_t task) {
    const std::size_t t = task / reps;
    const int rep = static_cast<int>(task % reps);
    const Evaluator ev = experiment.evaluator_for(rep);
    const Count total = cfg.traffic[t];

    Rng taguchi_rng(experiment.task_seed(rep, t, kTaguchiArm));
    const TaguchiArmResult taguchi = run_taguchi_arm(experiment.array(), ev, total, taguchi_rng);
    Rng evolution_rng(experiment.task_seed(rep, t, kEvolutionArm));
    const EvolutionArmResult evolution = run_evolution_arm(experiment, ev, total, evolution_rng);

    const auto r = static_cast<std::size_t>(rep);
    series.samples[t][0][r] = evolution.winner_cr;
    series.samples[t][1][r] = taguchi.predict_cr;
    series.samples[t][2][r] = taguchi.candidate_cr;
  });
  summarise(series);
  return series;
}

double taguchi_running_average(const OrthogonalArray& array, const Evaluator& evaluator, Count checkpoint) {
  if (checkpoint <= 0) throw std::invalid_argument("checkpoint must be positive");
  const auto served = rotation_split(checkpoint, array.row_count());
  double weighted = 0.0;
  for (std::size_t r = 0; r < array.row_count(); ++r) {
    weighted += static_cast<double>(served[r]) * evaluator.true_cr(array.row_candidate(r));
  }
  return weighted / static_cast<double>(checkpoint);
}

double evolution_running_average(const EvolutionResult& run, const TrafficPlan& plan, const Evaluator& evaluator,
                                 Count checkpoint) {
  if (checkpoint <= 0) throw std::invalid_argument("checkpoint must be positive");
  if (plan.size() != run.generations.size()) throw std::invalid_argument("plan does not match the run");
  Count remaining = checkpoint;
  double weighted = 0.0;
  Count candidate_impressions = 0;
  for (std::size_t g = 0; g < plan.size() && remaining > 0; ++g) {
    Count generation_total = 0;
    for (Count n : plan[g]) generation_total += n;
    const Count taken = std::min(remaining, generation_total);
    remaining -= taken;
    // A full generation is served exactly as planned; a partial one in rotation.
    const auto served = taken == generation_total ? plan[g] : rotation_split(taken, plan[g].size());
    const auto& population = run.generations[g].population;
    for (std::size_t i = 0; i < population.size(); ++i) {
      weighted += static_cast<double>(served[i]) * evaluator.true_cr(population[i].genome);
      candidate_impressions += served[i];
    }
  }
  if (remaining > 0) throw std::invalid_argument("checkpoint exceeds the planned traffic");
  if (candidate_impressions == 0) throw std::invalid_argument("no candidate impressions before checkpoint");
  return weighted / static_cast<double>(candidate_impressions);
}

ResultSeries run_during_experiment_curve(const Experiment& experiment, unsigned jobs) {
  const auto& cfg = experiment.config();
  ResultSeries series =
      make_series(experiment, {Method::kEvolution, Method::kTaguchi}, "average true conversion rate served");
  const Count total = cfg.traffic.back();
  const TrafficPlan plan = experiment.evolution_plan(total);

  parallel_for(static_cast<std::size_t>(cfg.repetitions), jobs, [&](std::size_t task) {
    const int rep = static_cast<int>(task);
    const Evaluator ev = experiment.evaluator_for(rep);
    Rng rng(experiment.task_seed(rep, cfg.traffic.size() - 1, kEvolutionArm));
    const EvolutionResult run = run_evolution(cfg.space, ev, plan, cfg.evolution, rng);
    for (std::size_t t = 0; t < cfg.traffic.size(); ++t) {
      series.samples[t][0][task] = evolution_running_average(run, plan, ev, cfg.traffic[t]);
      series.samples[t][1][task] = taguchi_running_average(experiment.array(), ev, cfg.traffic[t]);
    }
  });
  summarise(series);
  return series;
}

ResultSeries run_experiment(const Experiment& experiment, unsigned jobs) {
  return experiment.config().kind == ExperimentKind::kComparison ? run_comparison(experiment, jobs)
                                                                   : run_during_experiment_curve(experiment, jobs);
}

}  // namespace mvt
