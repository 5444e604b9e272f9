#include "mvtlab/simstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace mvt {

std::vector<Count> allocate_taguchi(Count total_traffic, Count rows) {
  if (rows <= 0) throw std::invalid_argument("cannot allocate traffic to zero rows");
  if (total_traffic < rows) {
    throw std::invalid_argument("total traffic " + std::to_string(total_traffic) +
                                " is smaller than the row count " + std::to_string(rows));
  }
  std::vector<Count> out(static_cast<std::size_t>(rows), total_traffic / rows);
  const Count extra = total_traffic % rows;
  for (Count r = 0; r < extra; ++r) ++out[static_cast<std::size_t>(r)];
  return out;
}

TrafficPlan allocate_evolution(Count total_traffic, Count generations, Count slots_per_generation) {
  if (generations <= 0 || slots_per_generation <= 0) {
    throw std::invalid_argument("generations and slots must be positive");
  }
  if (total_traffic < generations * slots_per_generation) {
    throw std::invalid_argument("total traffic " + std::to_string(total_traffic) +
                                " cannot give every slot of every generation an impression");
  }
  TrafficPlan plan;
  plan.reserve(static_cast<std::size_t>(generations));
  for (Count per_generation : allocate_taguchi(total_traffic, generations)) {
    plan.push_back(allocate_taguchi(per_generation, slots_per_generation));
  }
  return plan;
}

Count simulate_conversions(double true_cr, Count impressions, Rng& rng) {
  if (!(true_cr >= 0.0 && true_cr <= 1.0)) throw std::invalid_argument("conversion rate outside [0, 1]");
  if (impressions <= 0 || true_cr == 0.0) return 0;
  if (true_cr == 1.0) return impressions;
  std::binomial_distribution<Count> draw(impressions, true_cr);
  return draw(rng);
}

BetaPosterior global_prior(std::span<const CandidateStats> stats, double strength) {
  if (!(strength > 0.0)) throw std::invalid_argument("prior strength must be positive");
  Count impressions = 0;
  Count conversions = 0;
  for (const auto& s : stats) {
    impressions += s.impressions;
    conversions += s.conversions;
  }
  if (impressions <= 0) throw std::invalid_argument("global prior needs at least one impression");
  double mean = static_cast<double>(conversions) / static_cast<double>(impressions);
  if (conversions == 0 || conversions == impressions) {
    mean = (static_cast<double>(conversions) + 1.0) / (static_cast<double>(impressions) + 2.0);
  }
  return {mean * strength, (1.0 - mean) * strength};
}

BetaPosterior posterior(const CandidateStats& stats, const BetaPosterior& prior) {
  if (stats.conversions < 0 || stats.conversions > stats.impressions) {
    throw std::invalid_argument("conversions must lie in [0, impressions]");
  }
  return {prior.alpha + static_cast<double>(stats.conversions),
          prior.beta + static_cast<double>(stats.impressions - stats.conversions)};
}

namespace {

// Quantile window [q(kTail), q(1 - kTail)] of a Beta density. A shape below
// 2 makes the density unbounded or non-smooth at that end, so the window is
// opened up to the boundary instead and that end goes to tanh-sinh.
struct Window {
  double lo = 0.0;
  double hi = 1.0;
};

constexpr double kTail = 1e-14;
constexpr double kAbsoluteTarget = 1e-9;

Window mass_window(const BetaPosterior& b) {
  Window w;
  if (b.alpha >= 2.0) w.lo = boost::math::ibeta_inv(b.alpha, b.beta, kTail);
  if (b.beta >= 2.0) w.hi = boost::math::ibetac_inv(b.alpha, b.beta, kTail);
  return w;
}

}  // namespace

double prob_beats_control(const BetaPosterior& candidate, const BetaPosterior& control) {
  if (!(candidate.alpha > 0 && candidate.beta > 0 && control.alpha > 0 && control.beta > 0)) {
    throw std::invalid_argument("Beta parameters must be positive");
  }
  using boost::math::quadrature::gauss_kronrod;
  using boost::math::quadrature::tanh_sinh;

  // P(X > Y) = F_Y(a) + int_a^b f_Y(y) S_X(y) dy, where below a the
  // candidate's tail is 1 and above b it is 0 to within kTail.
  const Window y = mass_window(control);
  const Window x = mass_window(candidate);
  const double a = std::max(y.lo, x.lo);
  const double b = std::min(y.hi, x.hi);
  const double below = a > 0.0 ? boost::math::ibeta(control.alpha, control.beta, std::min(a, 1.0)) : 0.0;
  if (!(b > a)) return std::clamp(below, 0.0, 1.0);

  auto integrand = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return boost::math::ibeta_derivative(control.alpha, control.beta, t) *
           boost::math::ibetac(candidate.alpha, candidate.beta, t);
  };

  // Boost's tolerances are relative to the integral, which is unreachable
  // when the integral is tiny; a coarse first pass turns the absolute target
  // into a relative one.
  // Construction precomputes abscissae; integrate() is not const in this Boost.
  static thread_local tanh_sinh<double> ts;
  auto piece = [&](double lo, double hi, bool open_end, double& err) {
    err = 0.0;
    if (!(hi > lo)) return 0.0;
    const double rough = std::abs(gauss_kronrod<double, 15>::integrate(integrand, lo, hi, 0, 0.0));
    const double tol = std::clamp(kAbsoluteTarget / std::max(rough, 1e-300), 1e-12, 1e-2);
    if (open_end) return ts.integrate(integrand, lo, hi, tol, &err);
    return gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 15, tol, &err);
  };

  // Split at the control mean so each half has at most one open end.
  const double mid = std::clamp(control.mean(), a, b);
  double left_error = 0.0, right_error = 0.0;
  const double value = below + piece(a, mid, a == 0.0, left_error) + piece(mid, b, b == 1.0, right_error);
  const double error = left_error + right_error;
  if (!std::isfinite(value) || error > kPbcTolerance) {
    throw QuadratureError("probability-to-beat-control quadrature did not converge (error estimate " +
                          std::to_string(error) + ")");
  }
  return std::clamp(value, 0.0, 1.0);
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(h));
  const std::size_t above = std::min(below + 1, sorted.size() - 1);
  return sorted[below] + (h - static_cast<double>(below)) * (sorted[above] - sorted[below]);
}

Interval aggregate_runs(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("aggregation needs at least two repetitions");
  Interval out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  out.low = percentile(values, 0.025);
  out.high = percentile(values, 0.975);
  // Summation rounding can push the mean a few ulps outside a degenerate
  // interval; snap it back only at that scale.
  const double slack = 1e-12 * std::max(1.0, std::abs(out.mean));
  if (out.mean < out.low && out.low - out.mean <= slack) out.mean = out.low;
  if (out.mean > out.high && out.mean - out.high <= slack) out.mean = out.high;
  return out;
}

}  // namespace mvt
