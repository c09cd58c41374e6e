#include "netrisk/risk.hpp"

#include <cmath>

namespace netrisk {

double var_asymptotic(double constant, double alpha, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (constant < 0.0) throw std::invalid_argument("constant must be >= 0");
  if (constant == 0.0) return 0.0;
  return std::pow(constant, 1.0 / alpha) * std::pow(gamma, -1.0 / alpha);
}

double cote_asymptotic(double constant, double alpha, double gamma) {
  if (!(alpha > 1.0))
    throw std::invalid_argument(
        "conditional tail expectation is infinite for alpha <= 1");
  return alpha / (alpha - 1.0) * var_asymptotic(constant, alpha, gamma);
}

RiskMeasureCurve risk_measure_curve(RiskMeasureKind kind, double constant,
                                    double alpha,
                                    std::vector<double> level_grid) {
  RiskMeasureCurve c{kind, std::move(level_grid), {}, constant, alpha};
  c.values.reserve(c.level_grid.size());
  for (double gamma : c.level_grid)
    c.values.push_back(kind == RiskMeasureKind::VaR
                           ? var_asymptotic(constant, alpha, gamma)
                           : cote_asymptotic(constant, alpha, gamma));
  return c;
}

double diversification_benefit(const MarketScenario& s,
                               const ExactOptions& opts) {
  if (s.claims.dependence != Dependence::AsymptoticallyIndependent)
    throw std::invalid_argument(
        "diversification benefit is defined for the independent regime");
  if (s.norm.infinite || s.norm.r != 1.0)
    throw std::invalid_argument(
        "diversification benefit is defined for 1-norm aggregation");
  const double alpha = s.claims.alpha;
  KahanAccumulator denom;
  for (long i = 0; i < s.agents(); ++i)
    denom.add(std::pow(individual_constant_ind(s, i), 1.0 / alpha));
  if (!(denom.sum() > 0.0))
    throw std::invalid_argument(
        "degenerate scenario: all individual constants vanish");
  return 1.0 - std::pow(systemic_constant_ind(s, opts), 1.0 / alpha) /
                   denom.sum();
}

bool OrderingReport::all_hold() const {
  for (const auto& c : individual)
    if (!c.holds) return false;
  return systemic.holds;
}

namespace {

constexpr double kEqTol = 1e-10;

bool check(OrderingCheck& c) {
  switch (c.expected) {
    case OrderingCheck::Expected::IndBelowDep:
      c.holds = c.c_ind <= c.c_dep + kEqTol;
      break;
    case OrderingCheck::Expected::DepBelowInd:
      c.holds = c.c_dep <= c.c_ind + kEqTol;
      break;
    case OrderingCheck::Expected::Equal:
      c.holds = std::abs(c.c_ind - c.c_dep) <= kEqTol;
      break;
    case OrderingCheck::Expected::NoBound:
      c.holds = true;
      break;
  }
  return c.holds;
}

}  // namespace

OrderingReport ordering_report(const MarketScenario& s,
                               const ExactOptions& opts) {
  const double alpha = s.claims.alpha;
  const double r = s.norm.infinite ? std::numeric_limits<double>::infinity()
                                   : s.norm.r;
  MarketScenario ind = s;
  ind.claims.dependence = Dependence::AsymptoticallyIndependent;
  MarketScenario dep = s;
  dep.claims.dependence = Dependence::FullyDependent;

  OrderingReport report;
  for (long i = 0; i < s.agents(); ++i) {
    OrderingCheck c;
    c.c_ind = individual_constant_ind(ind, i);
    c.c_dep = individual_constant_dep(dep, i, opts).value;
    if (alpha == 1.0)
      c.expected = OrderingCheck::Expected::Equal;
    else if (alpha > 1.0)
      c.expected = OrderingCheck::Expected::IndBelowDep;
    else
      c.expected = OrderingCheck::Expected::DepBelowInd;
    check(c);
    report.individual.push_back(c);
  }

  OrderingCheck sys;
  sys.c_ind = systemic_constant_ind(ind, opts);
  sys.c_dep = systemic_constant_dep(dep, opts).value;
  if (alpha >= r)
    sys.expected = OrderingCheck::Expected::IndBelowDep;
  else if (alpha < 1.0)
    sys.expected = OrderingCheck::Expected::DepBelowInd;
  else {
    sys.expected = OrderingCheck::Expected::NoBound;
    report.alpha_in_uncovered_band = alpha > 1.0;
  }
  check(sys);
  report.systemic = sys;
  return report;
}

}  // namespace netrisk
