#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvtlab/genome.hpp"

namespace mvt {

/// Design matrix: one row per tested candidate, one column per variable.
struct OrthogonalArray {
  std::vector<int> column_levels;
  std::vector<std::vector<int>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return column_levels.size(); }

  Candidate row_candidate(std::size_t row) const { return Candidate(rows.at(row)); }

  friend bool operator==(const OrthogonalArray&, const OrthogonalArray&) = default;
};

struct PropertyCheck {
  bool passed = true;
  /// Offending columns (balance/range) or column pairs (orthogonality), 0-based.
  std::vector<std::pair<std::size_t, std::size_t>> offenders;
};

struct ValidationReport {
  PropertyCheck range;
  PropertyCheck balance;
  PropertyCheck orthogonality;
  /// Strength-2 pair balance. Informational: never affects valid().
  PropertyCheck pair_balance;

  bool valid() const { return range.passed && balance.passed && orthogonality.passed; }

  /// Human-readable multi-line summary naming failed properties.
  std::string summary() const;
};

inline constexpr double kOrthogonalityTolerance = 1e-9;

/// Checks value range, per-column balance and pairwise orthogonality of the
/// mean-centred columns. Failures are reported, never thrown.
ValidationReport validate(const OrthogonalArray& a, double tolerance = kOrthogonalityTolerance);

/// Parses the array text format: first non-comment line holds column levels,
/// each further line one row of 0-based value indices. `#` starts a comment.
/// Throws std::invalid_argument on parse errors and on validation failure
/// (message names the violated property).
OrthogonalArray load_array(std::string_view text);
OrthogonalArray load_array_file(const std::string& path);

/// Canonical text form (no comments, single spaces, trailing newline).
/// load_array(save_array(a)) == a and save_array is a fixed point on its output.
std::string save_array(const OrthogonalArray& a);

/// Names of arrays compiled into the library ("L4", "L9", "L16", "L36").
std::vector<std::string> bundled_array_names();

/// Loads a bundled array by name. Throws std::out_of_range for unknown names.
OrthogonalArray bundled_array(std::string_view name);

/// Raw text of a bundled array file.
const std::string& bundled_array_text(std::string_view name);

/// Resolves `name_or_path` as a bundled array name first, then as a file.
OrthogonalArray resolve_array(const std::string& name_or_path);

/// Mean score of rows whose `var` column equals `value`.
double main_effect(const OrthogonalArray& a, std::span<const double> scores, std::size_t var, int value);

struct EffectCell {
  double mean = 0.0;
  std::size_t rows = 0;
};

/// effect_table(a, s)[var][value]: mean score and supporting row count.
using EffectTable = std::vector<std::vector<EffectCell>>;
EffectTable effect_table(const OrthogonalArray& a, std::span<const double> scores);

/// Per variable, the value with the best main effect (lowest index on ties).
Candidate predict_best(const OrthogonalArray& a, std::span<const double> scores);

/// The highest-scoring row (earliest on ties).
Candidate best_tested(const OrthogonalArray& a, std::span<const double> scores);

/// Replaces a 2-level column and a 3-level column with one 6-level column
/// holding 3*v2 + v3, placed at the lower of the two positions.
/// Throws std::invalid_argument on level mismatch or an unbalanced result.
OrthogonalArray merge_columns(const OrthogonalArray& a, std::size_t col2, std::size_t col3);

/// Throws std::invalid_argument unless the array's columns match the space.
void require_matches(const OrthogonalArray& a, const SearchSpace& space);

}  // namespace mvt
