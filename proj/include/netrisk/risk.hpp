#pragma once

#include "netrisk/exact.hpp"
#include "netrisk/model.hpp"

#include <vector>

namespace netrisk {

/// VaR_{1-gamma} ~ C^{1/alpha} gamma^{-1/alpha} as gamma -> 0.
double var_asymptotic(double constant, double alpha, double gamma);

/// CoTE_{1-gamma} ~ alpha/(alpha-1) * VaR_{1-gamma}; needs alpha > 1.
double cote_asymptotic(double constant, double alpha, double gamma);

enum class RiskMeasureKind { VaR, CoTE };

/// Asymptotic (gamma -> 0) approximations evaluated on a finite gamma grid.
struct RiskMeasureCurve {
  RiskMeasureKind kind;
  std::vector<double> level_grid;  // gamma values in (0,1)
  std::vector<double> values;
  double constant;
  double alpha;
};

RiskMeasureCurve risk_measure_curve(RiskMeasureKind kind, double constant,
                                    double alpha,
                                    std::vector<double> level_grid);

/// D = 1 - (C^S_ind)^{1/alpha} / sum_i (C^i_ind)^{1/alpha}; independent regime,
/// 1-norm aggregation.
double diversification_benefit(const MarketScenario& s,
                               const ExactOptions& opts = {});

/// One side-by-side comparison of the two dependence extremes.
struct OrderingCheck {
  double c_ind = 0.0;
  double c_dep = 0.0;
  enum class Expected { IndBelowDep, DepBelowInd, Equal, NoBound } expected;
  bool holds = true;  // vacuously true when no bound is asserted
};

struct OrderingReport {
  std::vector<OrderingCheck> individual;  // one per agent
  OrderingCheck systemic;
  bool alpha_in_uncovered_band = false;  // alpha in (1, r): no systemic bound
  bool all_hold() const;
};

OrderingReport ordering_report(const MarketScenario& s,
                               const ExactOptions& opts = {});

}  // namespace netrisk
