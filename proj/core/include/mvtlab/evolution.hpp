#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_set>
#include <vector>

#include "mvtlab/evaluator.hpp"
#include "mvtlab/genome.hpp"
#include "mvtlab/random.hpp"
#include "mvtlab/simstats.hpp"

namespace mvt {

struct EvolutionConfig {
  int generations = 8;
  double mutation_rate = 0.01;  // per gene
  double elite_fraction = 0.2;
  double prior_strength = kDefaultPriorStrength;
  /// Re-breed children that duplicate an already tested genome, falling back
  /// to a forced one-gene mutation. Off reproduces plain elitist breeding.
  bool unique_children = true;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

inline constexpr std::size_t kNewLineage = std::numeric_limits<std::size_t>::max();

/// A population slot. Elites keep their lineage id and accumulated stats
/// across the generations they survive.
struct Individual {
  Candidate genome;
  CandidateStats stats;
  std::size_t lineage = kNewLineage;

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct GenerationRecord {
  std::size_t generation = 0;
  /// Stats are cumulative over the individual's lifetime, as of the end of
  /// this generation.
  std::vector<Individual> population;
  /// Impressions each slot received during this generation alone.
  std::vector<Count> served;
  /// Control traffic during this generation alone.
  CandidateStats control;
  /// Population indices carried into the next generation, best first.
  std::vector<std::size_t> elites;

  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

struct TestedCandidate {
  Candidate genome;
  CandidateStats stats;  // pooled over every individual carrying this genome
  double prob_beats_control = 0.0;
  double posterior_mean = 0.0;
};

struct EvolutionResult {
  std::vector<GenerationRecord> generations;
  CandidateStats control;          // control stats over the whole run
  std::vector<TestedCandidate> tested;  // distinct genomes in first-seen order
  Candidate winner;
  double winner_pbc = 0.0;
};

/// First generation: every one-gene variant of the control.
std::vector<Candidate> init_population(const SearchSpace& space);

/// Number of elites kept from a population of `size`: ceil(fraction * size).
std::size_t elite_count(std::size_t size, double fraction);

/// Ranks by posterior-mean conversion rate under `prior` (earlier index wins
/// ties), skips genomes already ranked, and returns the indices of the top
/// elite_count(size, fraction) distinct genomes.
std::vector<std::size_t> select_elites(std::span<const Individual> population, double fraction,
                                       const BetaPosterior& prior);

/// Uniform per-gene crossover.
Candidate crossover(const Candidate& parent_a, const Candidate& parent_b, Rng& rng);

/// Each gene independently, with probability `rate`, moves to a uniformly
/// chosen different value.
Candidate mutate(const Candidate& c, double rate, const SearchSpace& space, Rng& rng);

/// Changes exactly one uniformly chosen gene to a different value.
Candidate force_mutate(const Candidate& c, const SearchSpace& space, Rng& rng);

using GenomeSet = std::unordered_set<Candidate, CandidateHash>;

inline constexpr int kBreedingAttempts = 8;
inline constexpr int kForcedMutationAttempts = 64;

/// Elites first, unchanged and with their stats; the remaining slots hold
/// mutated children of two distinct elites (the same elite twice when only
/// one exists). Children carry kNewLineage and empty stats.
///
/// With config.unique_children and a `tested` set, a child already in
/// `tested` or earlier in the new generation is re-bred up to
/// kBreedingAttempts times, then force_mutate'd until novel; if the space
/// offers nothing new the duplicate is kept.
std::vector<Individual> next_generation(const GenerationRecord& record, const EvolutionConfig& config,
                                        const SearchSpace& space, Rng& rng, const GenomeSet* tested = nullptr);

/// Winner ordering: higher probability to beat control, except that values
/// within kPbcTolerance count as equal and fall back to posterior mean.
bool ranks_above(double pbc_a, double mean_a, double pbc_b, double mean_b);

/// Runs config.generations rounds of simulate, select and breed.
///
/// `plan` must have one row per generation with population_size + 1 slots;
/// the final slot of every row is the control's traffic. The winner is the
/// tested genome ranking highest under ranks_above, using a global prior
/// pooled over every tested candidate and the control.
EvolutionResult run_evolution(const SearchSpace& space, const Evaluator& evaluator, const TrafficPlan& plan,
                              const EvolutionConfig& config, Rng& rng);

}  // namespace mvt
