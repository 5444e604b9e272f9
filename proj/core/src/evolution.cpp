#include "mvtlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mvt {

void EvolutionConfig::validate() const {
  if (generations < 1) throw std::invalid_argument("generations must be at least 1");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw std::invalid_argument("mutation_rate must lie in [0, 1]");
  }
  if (!(elite_fraction > 0.0 && elite_fraction < 1.0)) {
    throw std::invalid_argument("elite_fraction must lie in (0, 1)");
  }
  if (!(prior_strength > 0.0)) throw std::invalid_argument("prior_strength must be positive");
}

std::vector<Candidate> init_population(const SearchSpace& space) { return one_gene_variants(space); }

std::size_t elite_count(std::size_t size, double fraction) {
  // Guard against 0.2 * 10 evaluating to 2.0000000000000004.
  const double raw = fraction * static_cast<double>(size);
  auto n = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(n, size > 0 ? 1 : 0, size);
}

std::vector<std::size_t> select_elites(std::span<const Individual> population, double fraction,
                                       const BetaPosterior& prior) {
  if (population.empty()) throw std::invalid_argument("cannot select elites from an empty population");
  std::vector<double> score(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (population[i].stats.impressions < 1) {
      throw std::invalid_argument("every candidate needs at least one impression before selection");
    }
    score[i] = posterior(population[i].stats, prior).mean();
  }
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  const std::size_t wanted = elite_count(population.size(), fraction);
  std::vector<std::size_t> elites;
  std::unordered_set<Candidate, CandidateHash> seen;
  for (std::size_t i : order) {
    if (elites.size() == wanted) break;
    if (seen.insert(population[i].genome).second) elites.push_back(i);
  }
  return elites;
}

Candidate crossover(const Candidate& parent_a, const Candidate& parent_b, Rng& rng) {
  if (parent_a.size() != parent_b.size()) throw std::invalid_argument("parents come from different spaces");
  std::bernoulli_distribution take_a(0.5);
  Candidate child = parent_a;
  for (std::size_t i = 0; i < child.size(); ++i) {
    if (!take_a(rng)) child.choices[i] = parent_b[i];
  }
  return child;
}

Candidate mutate(const Candidate& c, double rate, const SearchSpace& space, Rng& rng) {
  require_valid(c, space);
  if (rate <= 0.0) return c;
  std::bernoulli_distribution flip(rate);
  Candidate out = c;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!flip(rng)) continue;
    std::uniform_int_distribution<int> other(0, space.cardinality(i) - 2);
    int v = other(rng);
    if (v >= out.choices[i]) ++v;
    out.choices[i] = v;
  }
  return out;
}

Candidate force_mutate(const Candidate& c, const SearchSpace& space, Rng& rng) {
  require_valid(c, space);
  std::uniform_int_distribution<std::size_t> gene(0, space.size() - 1);
  const std::size_t i = gene(rng);
  std::uniform_int_distribution<int> other(0, space.cardinality(i) - 2);
  Candidate out = c;
  int v = other(rng);
  if (v >= out.choices[i]) ++v;
  out.choices[i] = v;
  return out;
}

std::vector<Individual> next_generation(const GenerationRecord& record, const EvolutionConfig& config,
                                        const SearchSpace& space, Rng& rng, const GenomeSet* tested) {
  if (record.elites.empty()) throw std::invalid_argument("no elites available for breeding");
  std::vector<Individual> next;
  next.reserve(record.population.size());
  for (std::size_t e : record.elites) next.push_back(record.population.at(e));

  const auto elites = static_cast<int>(record.elites.size());
  std::uniform_int_distribution<int> first(0, elites - 1);
  auto breed = [&] {
    const int a = first(rng);
    int b = a;
    if (elites > 1) {
      std::uniform_int_distribution<int> second(0, elites - 2);
      b = second(rng);
      if (b >= a) ++b;
    }
    const Candidate& pa = record.population[record.elites[static_cast<std::size_t>(a)]].genome;
    const Candidate& pb = record.population[record.elites[static_cast<std::size_t>(b)]].genome;
    return mutate(crossover(pa, pb, rng), config.mutation_rate, space, rng);
  };

  const bool enforce = config.unique_children && tested != nullptr;
  GenomeSet fresh;
  for (const auto& ind : next) fresh.insert(ind.genome);
  auto novel = [&](const Candidate& c) { return !tested->contains(c) && !fresh.contains(c); };

  while (next.size() < record.population.size()) {
    Individual child;
    child.genome = breed();
    if (enforce) {
      for (int attempt = 1; attempt < kBreedingAttempts && !novel(child.genome); ++attempt) child.genome = breed();
      for (int attempt = 0; attempt < kForcedMutationAttempts && !novel(child.genome); ++attempt) {
        child.genome = force_mutate(child.genome, space, rng);
      }
      fresh.insert(child.genome);
    }
    next.push_back(std::move(child));
  }
  return next;
}

bool ranks_above(double pbc_a, double mean_a, double pbc_b, double mean_b) {
  if (std::abs(pbc_a - pbc_b) > kPbcTolerance) return pbc_a > pbc_b;
  return mean_a > mean_b;
}

EvolutionResult run_evolution(const SearchSpace& space, const Evaluator& evaluator, const TrafficPlan& plan,
                              const EvolutionConfig& config, Rng& rng) {
  config.validate();
  if (!(evaluator.space() == space)) throw std::invalid_argument("evaluator was built for another space");

  std::vector<Individual> population;
  std::size_t next_lineage = 0;
  for (auto& c : init_population(space)) population.push_back({std::move(c), {}, next_lineage++});
  const std::size_t pop_size = population.size();

  if (plan.size() != static_cast<std::size_t>(config.generations)) {
    throw std::invalid_argument("traffic plan has " + std::to_string(plan.size()) + " generations, expected " +
                                std::to_string(config.generations));
  }
  for (const auto& row : plan) {
    if (row.size() != pop_size + 1) {
      throw std::invalid_argument("traffic plan rows need population size + 1 (control) slots");
    }
  }

  const double control_cr = evaluator.true_cr(control(space));
  GenomeSet tested{control(space)};
  EvolutionResult result;
  for (std::size_t g = 0; g < plan.size(); ++g) {
    GenerationRecord record;
    record.generation = g;
    record.served = std::vector<Count>(plan[g].begin(), plan[g].begin() + static_cast<std::ptrdiff_t>(pop_size));
    for (std::size_t i = 0; i < pop_size; ++i) {
      auto& ind = population[i];
      if (ind.lineage == kNewLineage) ind.lineage = next_lineage++;
      const Count n = plan[g][i];
      ind.stats += {n, simulate_conversions(evaluator.true_cr(ind.genome), n, rng)};
    }
    const Count n_control = plan[g][pop_size];
    record.control = {n_control, simulate_conversions(control_cr, n_control, rng)};
    result.control += record.control;

    std::vector<CandidateStats> stats;
    stats.reserve(pop_size);
    for (const auto& ind : population) stats.push_back(ind.stats);
    record.elites = select_elites(population, config.elite_fraction, global_prior(stats, config.prior_strength));
    record.population = population;
    for (const auto& ind : population) tested.insert(ind.genome);

    if (g + 1 < plan.size()) population = next_generation(record, config, space, rng, &tested);
    result.generations.push_back(std::move(record));
  }

  // Final stats per lineage come from its last generation; pool lineages by genome.
  std::unordered_map<std::size_t, const Individual*> last_seen;
  std::vector<std::size_t> lineage_order;
  for (const auto& record : result.generations) {
    for (const auto& ind : record.population) {
      if (last_seen.emplace(ind.lineage, &ind).second) lineage_order.push_back(ind.lineage);
      last_seen[ind.lineage] = &ind;
    }
  }
  std::unordered_map<Candidate, std::size_t, CandidateHash> slot;
  for (std::size_t lineage : lineage_order) {
    const Individual& ind = *last_seen.at(lineage);
    auto [it, inserted] = slot.emplace(ind.genome, result.tested.size());
    if (inserted) result.tested.push_back({ind.genome, {}, 0.0});
    result.tested[it->second].stats += ind.stats;
  }

  std::vector<CandidateStats> all;
  all.reserve(result.tested.size() + 1);
  for (const auto& t : result.tested) all.push_back(t.stats);
  all.push_back(result.control);
  const BetaPosterior prior = global_prior(all, config.prior_strength);
  const BetaPosterior control_post = posterior(result.control, prior);

  std::size_t best = 0;
  for (std::size_t i = 0; i < result.tested.size(); ++i) {
    auto& t = result.tested[i];
    const BetaPosterior post = posterior(t.stats, prior);
    t.prob_beats_control = prob_beats_control(post, control_post);
    t.posterior_mean = post.mean();
    const auto& b = result.tested[best];
    if (ranks_above(t.prob_beats_control, t.posterior_mean, b.prob_beats_control, b.posterior_mean)) best = i;
  }
  result.winner = result.tested[best].genome;
  result.winner_pbc = result.tested[best].prob_beats_control;
  return result;
}

}  // namespace mvt
