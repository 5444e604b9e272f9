#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mvtlab/config.hpp"
#include "mvtlab/evaluator.hpp"
#include "mvtlab/evolution.hpp"
#include "mvtlab/simstats.hpp"
#include "mvtlab/taguchi.hpp"

namespace mvt {

enum class Method {
  kEvolution,         // best candidate chosen by evolution
  kTaguchiPredict,    // per-variable best main effects, combined
  kTaguchiCandidate,  // best row actually tested
  kTaguchi,           // whole array, for during-experiment averages
};

std::string_view to_string(Method method);

/// Aggregated curves. values[t][m] summarises samples[t][m], which holds
/// one measurement per repetition at traffic[t] for methods[m].
struct ResultSeries {
  std::string title;
  std::string y_label;
  std::vector<Count> traffic;
  std::vector<Method> methods;
  std::vector<std::vector<Interval>> values;
  std::vector<std::vector<std::vector<double>>> samples;

  std::size_t method_index(Method m) const;
  const Interval& at(std::size_t traffic_index, Method m) const { return values[traffic_index][method_index(m)]; }
  const std::vector<double>& samples_at(std::size_t traffic_index, Method m) const {
    return samples[traffic_index][method_index(m)];
  }
};

/// A config with its orthogonal array resolved and checked against the space.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const OrthogonalArray& array() const { return array_; }
  const SearchSpace& space() const { return config_.space; }

  /// Evolution population size: sum of (cardinality - 1).
  std::size_t population_size() const;

  /// Ground truth for one repetition (shared by every repetition when the
  /// config fixes the evaluator).
  Evaluator evaluator_for(int repetition) const;
  std::uint64_t evaluator_seed(int repetition) const;

  /// Stream seed for one (repetition, traffic point, arm) task.
  std::uint64_t task_seed(int repetition, std::size_t traffic_index, int arm) const;

  /// Evolution traffic plan: population size + 1 slots per generation, the
  /// last being the control.
  TrafficPlan evolution_plan(Count total_traffic) const;

 private:
  ExperimentConfig config_;
  OrthogonalArray array_;
};

/// Loads config.array and applies config.merges in order.
OrthogonalArray build_array(const ExperimentConfig& config);

struct TaguchiArmResult {
  Candidate predicted;
  Candidate best_row;
  double predict_cr = 0.0;
  double candidate_cr = 0.0;
};

/// Splits traffic evenly over the array rows, simulates conversions and uses
/// observed rates as scores.
TaguchiArmResult run_taguchi_arm(const OrthogonalArray& array, const Evaluator& evaluator, Count total_traffic,
                                 Rng& rng);

struct EvolutionArmResult {
  EvolutionResult run;
  double winner_cr = 0.0;
};

EvolutionArmResult run_evolution_arm(const Experiment& experiment, const Evaluator& evaluator, Count total_traffic,
                                     Rng& rng);

/// Runs `tasks` jobs on up to `jobs` threads (0 = hardware concurrency).
/// The first exception thrown by a task is rethrown after all threads join.
void parallel_for(std::size_t tasks, unsigned jobs, const std::function<void(std::size_t)>& body);

/// Final-candidate true CR for evolution, Taguchi-predict and
/// Taguchi-candidate at each traffic value, both arms sharing evaluator and
/// total traffic.
ResultSeries run_comparison(const Experiment& experiment, unsigned jobs = 0);

/// Impression-weighted mean true CR served up to each traffic checkpoint
/// of one experiment whose total is the largest sweep value.
ResultSeries run_during_experiment_curve(const Experiment& experiment, unsigned jobs = 0);

/// Dispatches on config().kind.
ResultSeries run_experiment(const Experiment& experiment, unsigned jobs = 0);

/// Mean true CR over the first `checkpoint` impressions of the Taguchi arm,
/// rows being served in even rotation.
double taguchi_running_average(const OrthogonalArray& array, const Evaluator& evaluator, Count checkpoint);

/// Mean true CR over the first `checkpoint` impressions of an evolution run,
/// generations served in order and slots in even rotation within a
/// generation. Control impressions are excluded.
double evolution_running_average(const EvolutionResult& run, const TrafficPlan& plan, const Evaluator& evaluator,
                                 Count checkpoint);

}  // namespace mvt
