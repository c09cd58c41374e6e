#pragma once

#include "netrisk/exact.hpp"
#include "netrisk/model.hpp"

#include <utility>
#include <vector>

namespace netrisk {

/// Approximate value with a guaranteed error radius.
struct PoissonApprox {
  double value = 0.0;
  double bound = 0.0;   // |value - exact| <= bound
  double lambda = 0.0;  // mean parameter (summed over objects for aggregates)
};

enum class MomentShift { None, PlusOne };

/// E X^kappa (shift None) or E (1+X)^kappa (shift PlusOne) for X ~ Pois(lambda),
/// series truncated once the remaining tail is provably below tol.
double poisson_moment(double lambda, double exponent, MomentShift shift,
                      double tol = 1e-12);

/// Poisson surrogate for C^i_ind (proportional weights, independent claims).
PoissonApprox approx_individual_constant(const MarketScenario& s, long agent,
                                         double tol = 1e-12);

/// Poisson surrogate for C^S_ind (proportional weights, 1-norm).
PoissonApprox approx_systemic_constant(const MarketScenario& s);

struct DepApprox {
  std::vector<PoissonApprox> individual;
  PoissonApprox systemic;
};

/// Poisson surrogates for C^i_dep and C^S_dep (proportional weights, 1-norm).
DepApprox approx_dep_constants(const MarketScenario& s, double tol = 1e-12);

struct UninsuredPoissonApprox {
  PoissonApprox tail_constant_ind;
  PoissonApprox tail_constant_dep;
};

/// Poisson surrogates for the uninsured-loss tail constants; the bound field
/// carries the total-variation bound sum_j pi_j^2.
UninsuredPoissonApprox uninsured_poisson(const MarketScenario& s,
                                         double tol = 1e-12);

/// Poisson law for the number of non-insured objects: mean and TV bound.
std::pair<double, double> noninsured_count_approx(const MarketScenario& s);

}  // namespace netrisk
