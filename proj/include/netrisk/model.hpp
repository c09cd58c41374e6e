#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace netrisk {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Dependence { AsymptoticallyIndependent, FullyDependent };

/// Pareto claim parameters: P(V_j > t) = min(1, K_j t^{-alpha}),
/// i.e. V_j = K_j^{1/alpha} Z with Z standard Pareto on [1, inf).
struct ClaimSpec {
  double alpha = 1.0;
  VectorXd scales;  // K_1..K_d, all positive
  Dependence dependence = Dependence::AsymptoticallyIndependent;

  long objects() const { return scales.size(); }
};

/// Edge-probability families for the agent-object bipartite graph.
struct EdgeModel {
  enum class Kind { Explicit, Deterministic, Toy, Homogeneous, Rasch };

  Kind kind = Kind::Explicit;
  MatrixXd p;       // Explicit / Deterministic payload
  double toy_b = 0.0;
  long hom_q = 0;
  long hom_d = 0;
  double hom_p = 0.0;
  VectorXd beta;    // Rasch agent risk proneness
  VectorXd delta;   // Rasch object attractiveness

  static EdgeModel explicit_probs(MatrixXd probs);
  static EdgeModel deterministic(MatrixXd adjacency01);
  static EdgeModel toy(double b);
  static EdgeModel homogeneous(long q, long d, double p);
  static EdgeModel rasch(VectorXd beta, VectorXd delta);

  long agents() const;
  long objects() const;
};

/// Full q x d matrix of edge probabilities for any variant.
/// Deterministic and idempotent; throws on invalid Rasch products.
MatrixXd materialize_probabilities(const EdgeModel& model);

/// How a realized claim is split across the insuring agents.
struct WeightScheme {
  enum class Kind { Proportional, Compensated, ExplicitWeights };

  Kind kind = Kind::Proportional;
  double r = 1.0;   // Compensated exponent parameter, W_ij = deg(j)^{1-1/r}
  MatrixXd w;       // ExplicitWeights payload

  static WeightScheme proportional();
  static WeightScheme compensated(double r);
  static WeightScheme explicit_weights(MatrixXd w);

  /// Weight carried by agent i on object j when the realized degree of j is deg.
  double weight(long i, long j, long deg) const;
};

/// r-norm (r >= 1), r-quasinorm (0 < r < 1) or max-norm aggregation.
/// Unit vectors have norm 1 for every r.
struct AggregationNorm {
  double r = 1.0;
  bool infinite = false;

  static AggregationNorm lp(double r);
  static AggregationNorm max();

  double operator()(const VectorXd& x) const;
};

struct MarketScenario {
  EdgeModel edges;
  ClaimSpec claims;
  WeightScheme weights;
  AggregationNorm norm;

  long agents() const { return edges.agents(); }
  long objects() const { return edges.objects(); }
};

/// Structured invariant check; returns an empty list when the scenario is valid.
std::vector<std::string> validate_scenario(const MarketScenario& s);

/// Throws std::invalid_argument listing every violation.
void require_valid(const MarketScenario& s);

}  // namespace netrisk
