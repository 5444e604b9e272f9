#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvtlab/genome.hpp"

namespace mvt {

enum class EvaluatorMode { kLinear, kNonlinear };

std::string_view to_string(EvaluatorMode mode);
EvaluatorMode parse_evaluator_mode(std::string_view text);

/// Magnitudes used when sampling a ground-truth landscape.
struct WeightConfig {
  double bias = 0.05;         // control conversion rate
  double delta_main = 0.01;   // main effects drawn from [-delta_main, +delta_main]
  double delta_pair = 0.005;  // pair interactions drawn from [-delta_pair, +delta_pair]
};

inline constexpr double kMinConversionRate = 0.001;
inline constexpr double kMaxConversionRate = 0.999;

/// Per-value-pair interaction weights for variables first < second.
struct PairInteraction {
  std::size_t first = 0;
  std::size_t second = 0;
  int second_levels = 0;
  std::vector<double> weights;  // row-major [value_first][value_second]

  double at(int v1, int v2) const {
    return weights[static_cast<std::size_t>(v1) * static_cast<std::size_t>(second_levels) +
                   static_cast<std::size_t>(v2)];
  }
  double& at(int v1, int v2) {
    return weights[static_cast<std::size_t>(v1) * static_cast<std::size_t>(second_levels) +
                   static_cast<std::size_t>(v2)];
  }

  friend bool operator==(const PairInteraction&, const PairInteraction&) = default;
};

/// Ground-truth conversion model: bias plus per-variable main effects, plus
/// pairwise interactions in nonlinear mode. Every entry touching a control
/// value (index 0) is zero, so the control's rate equals the bias.
class Evaluator {
 public:
  /// Builds an all-zero landscape. Nonlinear mode allocates every pair table.
  Evaluator(SearchSpace space, EvaluatorMode mode, double bias);

  const SearchSpace& space() const { return space_; }
  EvaluatorMode mode() const { return mode_; }
  double bias() const { return bias_; }

  const std::vector<std::vector<double>>& main_effects() const { return main_effects_; }
  const std::vector<PairInteraction>& interactions() const { return interactions_; }

  /// Throws std::invalid_argument for control-valued or out-of-range entries.
  void set_main_effect(std::size_t var, int value, double weight);
  void set_interaction(std::size_t first, std::size_t second, int v1, int v2, double weight);

  /// Unclamped affine score.
  double raw_score(const Candidate& c) const;

  /// Clamped to [kMinConversionRate, kMaxConversionRate].
  double true_cr(const Candidate& c) const;

  std::string to_json() const;
  static Evaluator from_json(std::string_view text);

  friend bool operator==(const Evaluator&, const Evaluator&) = default;

 private:
  PairInteraction& pair(std::size_t first, std::size_t second);

  SearchSpace space_;
  EvaluatorMode mode_;
  double bias_;
  std::vector<std::vector<double>> main_effects_;
  std::vector<PairInteraction> interactions_;
};

/// Throws std::invalid_argument when the magnitudes cannot produce a sensible
/// landscape: bias outside the clamp range, delta_main <= 0, delta_pair < 0,
/// or a single weight able to push the control rate out of the clamp range.
void validate_weight_config(const WeightConfig& w);

/// Draws non-control weights uniformly; deterministic in `seed`.
Evaluator sample_evaluator(const SearchSpace& space, EvaluatorMode mode, const WeightConfig& weights,
                           std::uint64_t seed);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Exhaustive argmax of true_cr; lexicographically smallest candidate on
/// exact ties. Throws std::length_error above `cap` combinations.
std::pair<Candidate, double> brute_force_best(const Evaluator& ev,
                                              std::uint64_t cap = kDefaultEnumerationCap);

/// For linear landscapes: each variable's best value chosen independently.
Candidate separable_best(const Evaluator& ev);

}  // namespace mvt
