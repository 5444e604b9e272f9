#include "mvtlab/evaluator.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "mvtlab/random.hpp"

namespace mvt {

std::string_view to_string(EvaluatorMode mode) {
  return mode == EvaluatorMode::kLinear ? "linear" : "nonlinear";
}

EvaluatorMode parse_evaluator_mode(std::string_view text) {
  if (text == "linear") return EvaluatorMode::kLinear;
  if (text == "nonlinear") return EvaluatorMode::kNonlinear;
  throw std::invalid_argument("unknown evaluator mode '" + std::string(text) + "'");
}

Evaluator::Evaluator(SearchSpace space, EvaluatorMode mode, double bias)
    : space_(std::move(space)), mode_(mode), bias_(bias) {
  main_effects_.reserve(space_.size());
  for (int k : space_.cardinalities()) main_effects_.emplace_back(static_cast<std::size_t>(k), 0.0);
  if (mode_ == EvaluatorMode::kNonlinear) {
    for (std::size_t j = 0; j < space_.size(); ++j) {
      for (std::size_t k = j + 1; k < space_.size(); ++k) {
        PairInteraction p;
        p.first = j;
        p.second = k;
        p.second_levels = space_.cardinality(k);
        p.weights.assign(static_cast<std::size_t>(space_.cardinality(j) * space_.cardinality(k)), 0.0);
        interactions_.push_back(std::move(p));
      }
    }
  }
}

void Evaluator::set_main_effect(std::size_t var, int value, double weight) {
  if (var >= space_.size() || value < 0 || value >= space_.cardinality(var)) {
    throw std::invalid_argument("main effect index out of range");
  }
  if (value == 0) throw std::invalid_argument("control value carries no main effect");
  main_effects_[var][static_cast<std::size_t>(value)] = weight;
}

PairInteraction& Evaluator::pair(std::size_t first, std::size_t second) {
  const std::size_t n = space_.size();
  // Pairs are stored in (j, k>j) lexicographic order.
  const std::size_t index = first * n - first * (first + 1) / 2 + (second - first - 1);
  return interactions_[index];
}

void Evaluator::set_interaction(std::size_t first, std::size_t second, int v1, int v2, double weight) {
  if (mode_ != EvaluatorMode::kNonlinear) {
    throw std::invalid_argument("linear evaluators have no interaction terms");
  }
  if (first >= second || second >= space_.size() || v1 < 0 || v2 < 0 ||
      v1 >= space_.cardinality(first) || v2 >= space_.cardinality(second)) {
    throw std::invalid_argument("interaction index out of range");
  }
  if (v1 == 0 || v2 == 0) throw std::invalid_argument("control values carry no interaction");
  pair(first, second).at(v1, v2) = weight;
}

double Evaluator::raw_score(const Candidate& c) const {
  if (c.size() != space_.size()) {
    throw std::invalid_argument("candidate length does not match evaluator");
  }
  require_valid(c, space_);
  double score = bias_;
  for (std::size_t i = 0; i < c.size(); ++i) score += main_effects_[i][static_cast<std::size_t>(c[i])];
  for (const auto& p : interactions_) score += p.at(c[p.first], c[p.second]);
  return score;
}

double Evaluator::true_cr(const Candidate& c) const {
  return std::clamp(raw_score(c), kMinConversionRate, kMaxConversionRate);
}

std::string Evaluator::to_json() const {
  nlohmann::json j;
  j["space"] = space_.cardinalities();
  j["mode"] = std::string(to_string(mode_));
  j["bias"] = bias_;
  j["main_effects"] = main_effects_;
  auto pairs = nlohmann::json::array();
  for (const auto& p : interactions_) {
    pairs.push_back({{"first", p.first}, {"second", p.second}, {"weights", p.weights}});
  }
  j["interactions"] = pairs;
  return j.dump(2);
}

Evaluator Evaluator::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  Evaluator ev(SearchSpace(j.at("space").get<std::vector<int>>()),
               parse_evaluator_mode(j.at("mode").get<std::string>()), j.at("bias").get<double>());
  const auto mains = j.at("main_effects").get<std::vector<std::vector<double>>>();
  if (mains.size() != ev.space_.size()) throw std::invalid_argument("main effect table size mismatch");
  for (std::size_t i = 0; i < mains.size(); ++i) {
    if (mains[i].size() != ev.main_effects_[i].size() || mains[i][0] != 0.0) {
      throw std::invalid_argument("main effect table malformed for variable " + std::to_string(i));
    }
  }
  ev.main_effects_ = mains;
  const auto& pairs = j.at("interactions");
  if (pairs.size() != ev.interactions_.size()) throw std::invalid_argument("interaction table size mismatch");
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    auto& p = ev.interactions_[n];
    if (pairs[n].at("first").get<std::size_t>() != p.first ||
        pairs[n].at("second").get<std::size_t>() != p.second) {
      throw std::invalid_argument("interaction pairs out of order");
    }
    auto w = pairs[n].at("weights").get<std::vector<double>>();
    if (w.size() != p.weights.size()) throw std::invalid_argument("interaction table malformed");
    p.weights = std::move(w);
  }
  return ev;
}

void validate_weight_config(const WeightConfig& w) {
  if (!(w.bias >= kMinConversionRate && w.bias <= kMaxConversionRate)) {
    throw std::invalid_argument("bias must lie in [0.001, 0.999]");
  }
  if (!(w.delta_main > 0.0)) throw std::invalid_argument("delta_main must be positive");
  if (!(w.delta_pair >= 0.0)) throw std::invalid_argument("delta_pair must be non-negative");
  const double widest = std::max(w.delta_main, w.delta_pair);
  if (w.bias - widest < 0.0 || w.bias + widest > 1.0) {
    throw std::invalid_argument("weight magnitudes leave no headroom around the bias");
  }
}

Evaluator sample_evaluator(const SearchSpace& space, EvaluatorMode mode, const WeightConfig& weights,
                           std::uint64_t seed) {
  validate_weight_config(weights);
  Evaluator ev(space, mode, weights.bias);
  Rng rng(seed);
  std::uniform_real_distribution<double> main(-weights.delta_main, weights.delta_main);
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (int v = 1; v < space.cardinality(i); ++v) ev.set_main_effect(i, v, main(rng));
  }
  if (mode == EvaluatorMode::kNonlinear && weights.delta_pair > 0.0) {
    std::uniform_real_distribution<double> pair(-weights.delta_pair, weights.delta_pair);
    for (std::size_t j = 0; j < space.size(); ++j) {
      for (std::size_t k = j + 1; k < space.size(); ++k) {
        for (int a = 1; a < space.cardinality(j); ++a) {
          for (int b = 1; b < space.cardinality(k); ++b) ev.set_interaction(j, k, a, b, pair(rng));
        }
      }
    }
  }
  return ev;
}

std::pair<Candidate, double> brute_force_best(const Evaluator& ev, std::uint64_t cap) {
  const SearchSpace& space = ev.space();
  if (space.combination_count() > static_cast<WideCount>(cap)) {
    throw std::length_error("space " + space.to_string() + " has " +
                            to_string(space.combination_count()) +
                            " combinations, above the enumeration cap");
  }
  // Odometer enumeration in lexicographic order; strict > keeps the
  // lexicographically smallest candidate on ties.
  Candidate current = control(space);
  Candidate best = current;
  double best_cr = ev.true_cr(current);
  while (true) {
    std::size_t i = space.size();
    while (i > 0) {
      --i;
      if (++current.choices[i] < space.cardinality(i)) break;
      current.choices[i] = 0;
      if (i == 0) return {best, best_cr};
    }
    const double cr = ev.true_cr(current);
    if (cr > best_cr) {
      best_cr = cr;
      best = current;
    }
  }
}

Candidate separable_best(const Evaluator& ev) {
  Candidate c = control(ev.space());
  for (std::size_t i = 0; i < ev.space().size(); ++i) {
    const auto& w = ev.main_effects()[i];
    c.choices[i] = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
  }
  return c;
}

}  // namespace mvt
