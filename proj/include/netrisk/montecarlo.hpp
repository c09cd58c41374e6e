#pragma once

#include "netrisk/model.hpp"

#include <cstdint>
#include <vector>

namespace netrisk {

struct SimConfig {
  std::size_t replicates = 1'000'000;
  std::uint64_t seed = 1;
  std::vector<double> thresholds;  // empty: use default_thresholds
  double confidence = 0.99;        // two-sided interval coverage
};

/// Geometric grid of `points` thresholds spanning [10, 1000] times the largest
/// claim scale K_j^{1/alpha}, so every grid point sits past the claim support.
std::vector<double> default_thresholds(const MarketScenario& s, int points = 5);

/// What functional of one market realization is being sampled.
struct Target {
  enum class Kind { Agent, Aggregate, Uninsured };
  Kind kind = Kind::Aggregate;
  long agent = 0;

  static Target agent_loss(long i) { return {Kind::Agent, i}; }
  static Target aggregate() { return {Kind::Aggregate, 0}; }
  static Target uninsured() { return {Kind::Uninsured, 0}; }
};

/// One point on the empirical tail-constant curve t^alpha P(L > t).
struct TailEstimate {
  double threshold = 0.0;
  double point = 0.0;       // t^alpha * exceedances / N
  double half_width = 0.0;  // normal-approximation CI half width
  std::size_t n_exceed = 0;
  bool one_sided = false;   // zero exceedances: half_width is an upper bound
};

/// Quantile of the standard normal (Acklam's rational approximation).
double normal_quantile(double p);

/// One loss sample per replicate, index-stable across worker counts.
std::vector<double> sample_target(const MarketScenario& s, Target target,
                                  const SimConfig& cfg);

/// Empirical t^alpha P(L > t) on the threshold grid, with binomial CIs.
std::vector<TailEstimate> empirical_tail_constant(const MarketScenario& s,
                                                  Target target,
                                                  const SimConfig& cfg);

/// Order-statistic VaR at level 1 - gamma; requires N * gamma >= 20.
double empirical_var(const std::vector<double>& samples, double gamma);

/// Mean loss above the empirical VaR; requires N * gamma >= 50.
double empirical_cote(const std::vector<double>& samples, double gamma);

/// Exposure vectors F = A V of the replicates with ||F|| above `threshold`
/// (scenario norm), in replicate order.
std::vector<VectorXd> sample_exposures_above(const MarketScenario& s,
                                             const SimConfig& cfg,
                                             double threshold);

struct CountDistribution {
  std::vector<double> pmf;  // empirical law of the non-insured object count
  std::size_t replicates = 0;

  /// Total variation distance to Pois(lambda), tail mass included.
  double tv_to_poisson(double lambda) const;
};

/// Empirical law of the number of objects left without any insurer.
CountDistribution count_uninsured(const MarketScenario& s,
                                  const SimConfig& cfg);

}  // namespace netrisk
