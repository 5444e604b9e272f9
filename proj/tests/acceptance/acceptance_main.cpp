// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mvtlab/config.hpp"
#include "mvtlab/evaluator.hpp"
#include "mvtlab/evolution.hpp"
#include "mvtlab/harness.hpp"
#include "mvtlab/report.hpp"
#include "mvtlab/simstats.hpp"
#include "mvtlab/taguchi.hpp"

namespace {

using namespace mvt;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) passed = false;
    notes.push_back((ok ? "ok: " : "FAILED, expected: ") + what);
  }
};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool overlaps(const Interval& a, const Interval& b) { return a.low <= b.high && b.low <= a.high; }

// Comparison runs are shared between criteria 4-6 and the determinism check.
std::map<std::string, std::string>& csv_cache() {
  static std::map<std::string, std::string> cache;
  return cache;
}

ResultSeries run_preset(const std::string& name) {
  const auto start = Clock::now();
  const Experiment experiment(preset(name));
  ResultSeries series = run_experiment(experiment);
  csv_cache()[name] = render_csv(series);
  std::printf("  [%s: %.1f s]\n", name.c_str(), seconds_since(start));
  return series;
}

Outcome orthogonality_suite() {
  Outcome out;
  const auto start = Clock::now();
  for (const auto& name : bundled_array_names()) {
    const auto report = validate(bundled_array(name));
    out.check(report.balance.passed && report.orthogonality.passed && report.range.passed,
              name + " balance and centred orthogonality at 1e-9");
  }
  const auto l9 = bundled_array("L9");
  const std::vector<double> p{0.11, 0.23, 0.37, 0.41, 0.53, 0.67, 0.71, 0.83, 0.97};
  const double effect = main_effect(l9, p, 2, 2);
  out.check(std::abs(effect - (p[1] + p[3] + p[8]) / 3.0) < 1e-15, "L9 variable 3 value 2 averages rows 2, 4, 9");
  const double elapsed = seconds_since(start);
  out.check(elapsed < 1.0, fmt("runtime %.3f s < 1 s", elapsed));
  return out;
}

Outcome noiseless_exactness() {
  Outcome out;
  const auto start = Clock::now();
  const auto l9 = bundled_array("L9");
  int matches = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ev = sample_evaluator(SearchSpace({3, 3, 3, 3}), EvaluatorMode::kLinear, WeightConfig{},
                                     derive_seed(0xacce97, {seed}));
    std::vector<double> scores;
    for (std::size_t r = 0; r < l9.row_count(); ++r) scores.push_back(ev.true_cr(l9.row_candidate(r)));
    matches += predict_best(l9, scores) == brute_force_best(ev).first;
  }
  out.check(matches == 100, fmt("predict_best == brute force in %.0f/100", matches));
  const double elapsed = seconds_since(start);
  out.check(elapsed < 5.0, fmt("runtime %.3f s < 5 s", elapsed));
  return out;
}

Outcome pbc_numerics() {
  Outcome out;
  double worst_same = 0.0;
  for (const BetaPosterior b : {BetaPosterior{1, 1}, BetaPosterior{2, 1}, BetaPosterior{51, 951},
                                BetaPosterior{50'001, 950'001}}) {
    worst_same = std::max(worst_same, std::abs(prob_beats_control(b, b) - 0.5));
  }
  out.check(worst_same < 1e-6, fmt("identical posteriors: max |p - 0.5| = %.2e", worst_same));
  const double five_sixths = prob_beats_control({2, 1}, {1, 2});
  out.check(std::abs(five_sixths - 5.0 / 6.0) < 1e-6, fmt("Beta(2,1) vs Beta(1,2) = %.9f", five_sixths));
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const BetaPosterior a{1.0 + 7.0 * i, 2.0 + 90.0 * j};
      const BetaPosterior b{1.5 + 6.0 * j, 3.0 + 85.0 * i};
      worst = std::max(worst, std::abs(prob_beats_control(a, b) + prob_beats_control(b, a) - 1.0));
    }
  out.check(worst < 2e-6, fmt("complement identity over 10x10 grid: max error %.2e", worst));
  return out;
}

Outcome small_linear_comparison(const ResultSeries& s) {
  Outcome out;
  const auto t4 = static_cast<std::size_t>(std::find(s.traffic.begin(), s.traffic.end(), 10'000) - s.traffic.begin());
  const auto& evo = s.at(t4, Method::kEvolution);
  const auto& pred = s.at(t4, Method::kTaguchiPredict);
  out.check(evo.mean > pred.mean && evo.low > pred.high,
            fmt("at 1e4 evolution %.5f [%.5f, %.5f] above predict %.5f with separated intervals", evo.mean, evo.low,
                evo.high, pred.mean) +
                fmt(" [%.5f, %.5f]", pred.low, pred.high));
  for (std::size_t t = 0; t < s.traffic.size(); ++t) {
    if (s.traffic[t] < 1'000'000) continue;
    const double gap = std::abs(s.at(t, Method::kEvolution).mean - s.at(t, Method::kTaguchiPredict).mean);
    out.check(gap < 0.002, fmt("at %.0f |evolution - predict| = %.5f < 0.002", double(s.traffic[t]), gap));
  }
  bool below = true;
  for (std::size_t t = 0; t < s.traffic.size(); ++t) {
    below = below && s.at(t, Method::kTaguchiCandidate).mean < s.at(t, Method::kTaguchiPredict).mean;
  }
  out.check(below, "taguchi-candidate mean below taguchi-predict at every point");
  return out;
}

Outcome mixed_linear_comparison(const ResultSeries& s) {
  Outcome out;
  for (std::size_t t = 0; t < s.traffic.size(); ++t) {
    if (s.traffic[t] >= 5'000'000) continue;
    const double e = s.at(t, Method::kEvolution).mean;
    const double p = s.at(t, Method::kTaguchiPredict).mean;
    out.check(e > p, fmt("at %.0f evolution %.5f > predict %.5f", double(s.traffic[t]), e, p));
  }
  const auto t5 = static_cast<std::size_t>(std::find(s.traffic.begin(), s.traffic.end(), 100'000) - s.traffic.begin());
  const auto& evo = s.at(t5, Method::kEvolution);
  const auto& pred = s.at(t5, Method::kTaguchiPredict);
  out.check(evo.low > pred.high, fmt("at 1e5 evolution low %.5f above predict high %.5f", evo.low, pred.high));
  return out;
}

Outcome mixed_nonlinear_comparison(const ResultSeries& s) {
  Outcome out;
  for (std::size_t t = 0; t < s.traffic.size(); ++t) {
    const auto& pred = s.at(t, Method::kTaguchiPredict);
    const auto& cand = s.at(t, Method::kTaguchiCandidate);
    out.check(overlaps(pred, cand), fmt("at %.0f predict [%.5f, %.5f] overlaps candidate", double(s.traffic[t]),
                                        pred.low, pred.high) +
                                        fmt(" [%.5f, %.5f]", cand.low, cand.high));
  }
  for (std::size_t t = 0; t < s.traffic.size(); ++t) {
    const double e = s.at(t, Method::kEvolution).mean;
    const double p = s.at(t, Method::kTaguchiPredict).mean;
    out.check(e > p, fmt("at %.0f evolution %.5f > predict %.5f", double(s.traffic[t]), e, p));
  }
  return out;
}

Outcome during_experiment_averages(const ResultSeries& s) {
  Outcome out;
  const auto& first = s.samples_at(0, Method::kEvolution);
  const auto& last = s.samples_at(s.traffic.size() - 1, Method::kEvolution);
  int improved = 0;
  for (std::size_t r = 0; r < first.size(); ++r) improved += last[r] > first[r];
  out.check(improved >= 18, fmt("evolution final average above first in %.0f/%.0f repetitions", improved,
                                static_cast<double>(first.size())));
  double lo = 1.0, hi = 0.0;
  for (std::size_t t = 0; t < s.traffic.size(); ++t) {
    lo = std::min(lo, s.at(t, Method::kTaguchi).mean);
    hi = std::max(hi, s.at(t, Method::kTaguchi).mean);
  }
  out.check(hi - lo < 0.002, fmt("taguchi mean curve range %.5f < 0.002", hi - lo));
  return out;
}

Outcome determinism() {
  Outcome out;
  for (const auto& name : preset_names()) {
    const Experiment experiment(preset(name));
    // A different worker count must not change a single byte.
    const std::string again = render_csv(run_experiment(experiment, 3));
    const auto it = csv_cache().find(name);
    const std::string reference = it != csv_cache().end() ? it->second : render_csv(run_experiment(experiment));
    out.check(again == reference, name + " rerun byte-identical");
  }
  return out;
}

Outcome structural_suite() {
  Outcome out;
  for (const auto& name : preset_names()) {
    const Experiment experiment(preset(name));
    const auto ev = experiment.evaluator_for(0);
    Rng rng(experiment.task_seed(0, 0, 2));
    const auto run = run_evolution_arm(experiment, ev, experiment.config().traffic.back(), rng).run;
    std::size_t expected = 0;
    for (int k : experiment.space().cardinalities()) expected += static_cast<std::size_t>(k - 1);
    bool sizes = run.generations.size() == 8;
    bool persist = true;
    for (std::size_t g = 0; g < run.generations.size(); ++g) {
      const auto& rec = run.generations[g];
      sizes = sizes && rec.population.size() == expected;
      if (g + 1 == run.generations.size()) continue;
      for (std::size_t e = 0; e < rec.elites.size(); ++e) {
        const auto& before = rec.population[rec.elites[e]];
        const auto& after = run.generations[g + 1].population[e];
        persist = persist && after.genome == before.genome && after.lineage == before.lineage &&
                  after.stats.impressions >= before.stats.impressions;
      }
    }
    out.check(sizes, name + ": 8 generations of " + std::to_string(expected) + " candidates");
    out.check(persist, name + ": elites carried unchanged into the next generation");
  }

  Rng rng(0x5eed);
  {
    const Candidate a{0, 0, 0, 0}, b{1, 1, 1, 1};
    std::vector<int> from_a(4, 0);
    for (int i = 0; i < 10'000; ++i) {
      const auto child = crossover(a, b, rng);
      for (std::size_t g = 0; g < 4; ++g) from_a[g] += child[g] == 0;
    }
    double worst = 0.0;
    for (int n : from_a) worst = std::max(worst, std::abs(n / 1e4 - 0.5));
    out.check(worst <= 0.02, fmt("crossover parent-a frequency within 0.5 +- 0.02 (max dev %.4f)", worst));
  }
  {
    const SearchSpace space(std::vector<int>(100, 3));
    std::size_t changed = 0;
    for (int i = 0; i < 10'000; ++i) changed += hamming_distance(control(space), mutate(control(space), 0.01, space, rng));
    const double freq = static_cast<double>(changed) / 1e6;
    out.check(std::abs(freq - 0.01) <= 0.001, fmt("mutation frequency %.5f within 0.01 +- 0.001", freq));
  }
  {
    Rng m(1);
    const SearchSpace bin({2, 2, 2});
    out.check(mutate(Candidate{0, 0, 0}, 1.0, bin, m) == Candidate{1, 1, 1}, "rate 1 on binary genes flips all");
  }
  {
    double sum = 0.0;
    for (int i = 0; i < 1000; ++i) sum += static_cast<double>(simulate_conversions(0.05, 1'000'000, rng)) / 1e6;
    out.check(std::abs(sum / 1000 - 0.05) <= 0.0005, fmt("binomial mean %.6f within 0.05 +- 0.0005", sum / 1000));
  }
  {
    const auto plan = allocate_evolution(8000, 8, 10);
    Count elite = 0;
    for (const auto& row : plan) elite += row[0];
    out.check(elite == 800, "elite surviving 8 generations at (8000, 8, 10) accrues 800 impressions");
  }
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "orthogonality suite", orthogonality_suite},
      {2, "noiseless-linear exactness", noiseless_exactness},
      {3, "probability-to-beat-control numerics", pbc_numerics},
      {4, "[3,3,3,3] linear comparison", [] { return small_linear_comparison(run_preset("setting2-linear")); }},
      {5, "mixed-genome linear comparison", [] { return mixed_linear_comparison(run_preset("mixed-linear")); }},
      {6, "mixed-genome nonlinear comparison", [] { return mixed_nonlinear_comparison(run_preset("mixed-nonlinear")); }},
      {7, "during-experiment averages", [] { return during_experiment_averages(run_preset("during-experiment")); }},
      {8, "determinism", determinism},
      {9, "evolution structural suite", structural_suite},
  };

  int failures = 0;
  std::vector<std::string> summary;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.check(false, std::string("exception: ") + e.what());
    }
    for (const auto& note : outcome.notes) std::printf("    %s\n", note.c_str());
    const std::string line =
        std::string(outcome.passed ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + ": " + c.title;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    summary.push_back(line);
    failures += !outcome.passed;
  }
  std::printf("\nsummary\n");
  for (const auto& line : summary) std::printf("%s\n", line.c_str());
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
