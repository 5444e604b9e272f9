#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mvt {

/// Unsigned 128-bit count, wide enough for every realistic design space.
__extension__ typedef unsigned __int128 WideCount;

std::string to_string(WideCount value);

/// Per-variable value counts defining a combinatorial design space.
///
/// A space with cardinalities [2,4,5,3] describes a page with four
/// changeable parts offering 2, 4, 5 and 3 alternatives respectively.
class SearchSpace {
 public:
  /// Throws std::invalid_argument if empty or any cardinality is < 2.
  explicit SearchSpace(std::vector<int> cardinalities);

  /// Parses "[3,6,2]" (brackets optional, commas or whitespace separated).
  static SearchSpace parse(std::string_view text);

  std::size_t size() const { return cardinalities_.size(); }
  int cardinality(std::size_t var) const { return cardinalities_.at(var); }
  const std::vector<int>& cardinalities() const { return cardinalities_; }

  /// Length of the concatenated one-hot genome.
  std::size_t one_hot_length() const;

  /// Number of distinct candidates; saturates at the maximum WideCount.
  WideCount combination_count() const;

  std::string to_string() const;

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;

 private:
  std::vector<int> cardinalities_;
};

/// One 0-based value index per variable.
struct Candidate {
  std::vector<int> choices;

  Candidate() = default;
  explicit Candidate(std::vector<int> c) : choices(std::move(c)) {}
  Candidate(std::initializer_list<int> c) : choices(c) {}

  std::size_t size() const { return choices.size(); }
  int operator[](std::size_t i) const { return choices[i]; }

  bool valid_for(const SearchSpace& space) const;

  /// Compact rendering, e.g. "0-2-1-0".
  std::string to_string() const;

  friend auto operator<=>(const Candidate&, const Candidate&) = default;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateHash {
  std::size_t operator()(const Candidate& c) const noexcept;
};

/// Throws std::invalid_argument unless `c` is valid for `space`.
void require_valid(const Candidate& c, const SearchSpace& space);

/// The default configuration: first value of every variable.
Candidate control(const SearchSpace& space);

std::vector<std::uint8_t> to_one_hot(const Candidate& c, const SearchSpace& space);

/// Inverse of to_one_hot. Throws std::invalid_argument on a length mismatch
/// or a segment without exactly one set bit.
Candidate from_one_hot(std::span<const std::uint8_t> bits, const SearchSpace& space);

/// Every candidate differing from control in exactly one variable, ordered
/// variable-major then by value index.
std::vector<Candidate> one_gene_variants(const SearchSpace& space);

/// Number of positions where the two candidates differ.
std::size_t hamming_distance(const Candidate& a, const Candidate& b);

}  // namespace mvt
