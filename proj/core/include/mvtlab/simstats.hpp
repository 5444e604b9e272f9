#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mvtlab/random.hpp"

namespace mvt {

using Count = std::int64_t;

/// Impressions and conversions observed for one candidate.
struct CandidateStats {
  Count impressions = 0;
  Count conversions = 0;

  double observed_rate() const {
    return impressions > 0 ? static_cast<double>(conversions) / static_cast<double>(impressions) : 0.0;
  }

  CandidateStats& operator+=(const CandidateStats& other) {
    impressions += other.impressions;
    conversions += other.conversions;
    return *this;
  }

  friend bool operator==(const CandidateStats&, const CandidateStats&) = default;
};

struct BetaPosterior {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const { return alpha / (alpha + beta); }

  friend bool operator==(const BetaPosterior&, const BetaPosterior&) = default;
};

/// Thrown when the probability-to-beat-control integral does not reach its
/// error target.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Even split over `rows`; the first (total mod rows) rows get one extra.
std::vector<Count> allocate_taguchi(Count total_traffic, Count rows);

/// Per-generation, per-slot impressions. Each generation receives an even
/// share of the total (remainder to the earliest generations), split evenly
/// over its slots (remainder to the earliest slots).
using TrafficPlan = std::vector<std::vector<Count>>;
TrafficPlan allocate_evolution(Count total_traffic, Count generations, Count slots_per_generation);

/// Exact binomial draw; constant expected cost for large impression counts.
Count simulate_conversions(double true_cr, Count impressions, Rng& rng);

inline constexpr double kDefaultPriorStrength = 100.0;

/// Beta prior whose mean is the pooled conversion rate of `stats`, scaled to
/// `strength` pseudo-observations. A pooled rate of exactly 0 or 1 is pulled
/// inward to (conversions + 1) / (impressions + 2).
BetaPosterior global_prior(std::span<const CandidateStats> stats, double strength = kDefaultPriorStrength);

/// Conjugate update of `prior` with the observed counts.
BetaPosterior posterior(const CandidateStats& stats, const BetaPosterior& prior);

inline constexpr double kPbcTolerance = 1e-6;

/// P(X > Y) for independent X ~ candidate, Y ~ control, by adaptive
/// quadrature of the control density against the candidate's upper tail
/// (Gauss-Kronrod, or tanh-sinh next to an unbounded density endpoint). Throws QuadratureError if the error estimate exceeds
/// kPbcTolerance.
double prob_beats_control(const BetaPosterior& candidate, const BetaPosterior& control);

struct Interval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Mean with the 2.5th and 97.5th percentiles (linear interpolation between
/// order statistics). Throws std::invalid_argument for fewer than two values.
Interval aggregate_runs(std::span<const double> values);

/// Linear-interpolated empirical quantile, q in [0, 1].
double percentile(std::span<const double> values, double q);

}  // namespace mvt
