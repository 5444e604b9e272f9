#include "mvtlab/genome.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mvt {

std::string to_string(WideCount value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

SearchSpace::SearchSpace(std::vector<int> cardinalities)
    : cardinalities_(std::move(cardinalities)) {
  if (cardinalities_.empty()) {
    throw std::invalid_argument("search space needs at least one variable");
  }
  for (std::size_t i = 0; i < cardinalities_.size(); ++i) {
    if (cardinalities_[i] < 2) {
      throw std::invalid_argument("variable " + std::to_string(i) +
                                  " has fewer than two values");
    }
  }
}

SearchSpace SearchSpace::parse(std::string_view text) {
  std::vector<int> values;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '[' || ch == ']' || ch == ',' || ch == ' ' || ch == '\t') {
      ++i;
      continue;
    }
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
    if (ec != std::errc()) {
      throw std::invalid_argument("malformed search space: '" + std::string(text) + "'");
    }
    values.push_back(v);
    i = static_cast<std::size_t>(ptr - text.data());
  }
  return SearchSpace(std::move(values));
}

std::size_t SearchSpace::one_hot_length() const {
  return std::accumulate(cardinalities_.begin(), cardinalities_.end(), std::size_t{0},
                         [](std::size_t acc, int k) { return acc + static_cast<std::size_t>(k); });
}

WideCount SearchSpace::combination_count() const {
  constexpr WideCount kMax = ~WideCount{0};
  WideCount total = 1;
  for (int k : cardinalities_) {
    const auto kk = static_cast<WideCount>(k);
    if (total > kMax / kk) return kMax;
    total *= kk;
  }
  return total;
}

std::string SearchSpace::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < cardinalities_.size(); ++i) {
    if (i) out << ',';
    out << cardinalities_[i];
  }
  out << ']';
  return out.str();
}

bool Candidate::valid_for(const SearchSpace& space) const {
  if (choices.size() != space.size()) return false;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (choices[i] < 0 || choices[i] >= space.cardinality(i)) return false;
  }
  return true;
}

std::string Candidate::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (i) out.push_back('-');
    out += std::to_string(choices[i]);
  }
  return out;
}

std::size_t CandidateHash::operator()(const Candidate& c) const noexcept {
  // FNV-1a over the choice indices.
  std::uint64_t h = 1469598103934665603ULL;
  for (int v : c.choices) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

void require_valid(const Candidate& c, const SearchSpace& space) {
  if (c.size() != space.size()) {
    throw std::invalid_argument("candidate has " + std::to_string(c.size()) +
                                " choices but space has " + std::to_string(space.size()) +
                                " variables");
  }
  if (!c.valid_for(space)) {
    throw std::invalid_argument("candidate " + c.to_string() + " is out of range for space " +
                                space.to_string());
  }
}

Candidate control(const SearchSpace& space) {
  return Candidate(std::vector<int>(space.size(), 0));
}

std::vector<std::uint8_t> to_one_hot(const Candidate& c, const SearchSpace& space) {
  require_valid(c, space);
  std::vector<std::uint8_t> bits(space.one_hot_length(), 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    bits[offset + static_cast<std::size_t>(c[i])] = 1;
    offset += static_cast<std::size_t>(space.cardinality(i));
  }
  return bits;
}

Candidate from_one_hot(std::span<const std::uint8_t> bits, const SearchSpace& space) {
  if (bits.size() != space.one_hot_length()) {
    throw std::invalid_argument("one-hot length " + std::to_string(bits.size()) +
                                " does not match space length " +
                                std::to_string(space.one_hot_length()));
  }
  std::vector<int> choices;
  choices.reserve(space.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto k = static_cast<std::size_t>(space.cardinality(i));
    int chosen = -1;
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint8_t b = bits[offset + j];
      if (b > 1) throw std::invalid_argument("one-hot bits must be 0 or 1");
      if (b == 1) {
        if (chosen >= 0) {
          throw std::invalid_argument("segment " + std::to_string(i) + " has more than one set bit");
        }
        chosen = static_cast<int>(j);
      }
    }
    if (chosen < 0) throw std::invalid_argument("segment " + std::to_string(i) + " has no set bit");
    choices.push_back(chosen);
    offset += k;
  }
  return Candidate(std::move(choices));
}

std::vector<Candidate> one_gene_variants(const SearchSpace& space) {
  std::vector<Candidate> out;
  const Candidate base = control(space);
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (int v = 1; v < space.cardinality(i); ++v) {
      Candidate c = base;
      c.choices[i] = v;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::size_t hamming_distance(const Candidate& a, const Candidate& b) {
  if (a.size() != b.size()) throw std::invalid_argument("candidates differ in length");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

}  // namespace mvt
