#pragma once

#include "netrisk/model.hpp"

namespace netrisk {

/// Exact Poisson-binomial law of an object's degree over independent
/// Bernoulli(p_1..p_q) edge indicators.
struct DegreeLaw {
  VectorXd pmf;  // pmf(l) = P(deg = l), l = 0..q

  long max_degree() const { return pmf.size() - 1; }

  double prob_positive() const { return 1.0 - pmf(0); }

  /// E[deg^expo 1(deg > 0)], fixed-order compensated accumulation.
  double moment_positive(double expo) const;
};

/// O(q^2) dynamic-programming Poisson-binomial pmf.
DegreeLaw degree_law(const VectorXd& p_column);

/// Degree law of the column with agent `excluded` removed (pmf length q).
DegreeLaw degree_law_excluding(const VectorXd& p_column, long excluded);

}  // namespace netrisk
