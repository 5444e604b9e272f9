#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvtlab/evaluator.hpp"
#include "mvtlab/evolution.hpp"
#include "mvtlab/genome.hpp"
#include "mvtlab/simstats.hpp"

namespace mvt {

enum class ExperimentKind {
  kComparison,  // best-candidate true CR at each total traffic
  kDuring,      // average true CR served up to each traffic checkpoint
};

std::string_view to_string(ExperimentKind kind);

/// Everything needed to reproduce one experiment.
///
/// Text form is one `key = value` per line with `#` comments:
///
///   name = mixed-linear
///   experiment = comparison          # or: during
///   space = [3,6,2,3,6,2,2,6]
///   mode = linear                    # or: nonlinear
///   bias = 0.05
///   delta_main = 0.01
///   delta_pair = 0.005
///   array = L36                      # bundled name or file path
///   merge = 1:2, 4:5, 7:8            # optional 2-level:3-level merges, applied in order
///   generations = 8
///   mutation_rate = 0.01
///   elite_fraction = 0.2
///   prior_strength = 100
///   unique_children = true
///   traffic = [1000, 10000, 100000]
///   repetitions = 20
///   seed = 20190607
///   fixed_evaluator = false
///   out = results/mixed-linear       # optional
struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::kComparison;
  SearchSpace space{std::vector<int>{3, 3, 3, 3}};
  EvaluatorMode mode = EvaluatorMode::kLinear;
  WeightConfig weights;
  std::string array = "L9";
  std::vector<std::pair<std::size_t, std::size_t>> merges;
  EvolutionConfig evolution;
  std::vector<Count> traffic{1000, 10000, 100000, 1000000};
  int repetitions = 20;
  std::uint64_t seed = 20190607;
  bool fixed_evaluator = false;
  std::string output_dir;

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;

  /// Canonical key-value text; parse_config(to_text()) reproduces the config.
  std::string to_text() const;

  /// FNV-1a 64 of to_text(), as 16 hex digits.
  std::string hash() const;
};

/// Throws std::invalid_argument on unknown keys, malformed values or an
/// invalid result.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

std::vector<std::string> preset_names();
const std::string& preset_text(std::string_view name);
ExperimentConfig preset(std::string_view name);

/// Preset name if one matches, otherwise a config file path.
ExperimentConfig resolve_config(const std::string& preset_or_path);

/// Parses "[1000, 3e4, 10000]" or "1000,30000". Values must be integral.
std::vector<Count> parse_traffic_list(std::string_view text);

}  // namespace mvt
