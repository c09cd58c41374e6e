#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netrisk/model.hpp"

using namespace netrisk;

TEST_CASE("toy edge probabilities follow the cyclic pattern") {
  const double b = 0.3;
  const MatrixXd p = materialize_probabilities(EdgeModel::toy(b));
  REQUIRE(p.rows() == 3);
  REQUIRE(p.cols() == 3);
  for (long i = 0; i < 3; ++i) CHECK(p(i, i) == 1.0);
  CHECK(p(0, 1) == doctest::Approx(b).epsilon(1e-15));
  CHECK(p(0, 2) == doctest::Approx(b * b).epsilon(1e-15));
  CHECK(p(1, 0) == doctest::Approx(b * b).epsilon(1e-15));
  CHECK(p(1, 2) == doctest::Approx(b).epsilon(1e-15));
  CHECK(p(2, 0) == doctest::Approx(b).epsilon(1e-15));
  CHECK(p(2, 1) == doctest::Approx(b * b).epsilon(1e-15));
}

TEST_CASE("homogeneous and rasch probabilities") {
  const MatrixXd ph = materialize_probabilities(EdgeModel::homogeneous(4, 6, 0.2));
  CHECK(ph.rows() == 4);
  CHECK(ph.cols() == 6);
  CHECK(ph.minCoeff() == 0.2);
  CHECK(ph.maxCoeff() == 0.2);

  VectorXd beta(2), delta(3);
  beta << 0.5, 0.8;
  delta << 0.2, 1.0, 0.4;
  const MatrixXd pr = materialize_probabilities(EdgeModel::rasch(beta, delta));
  CHECK(pr(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pr(1, 2) == doctest::Approx(0.32).epsilon(1e-15));

  VectorXd bad_beta(1), bad_delta(1);
  bad_beta << 2.0;
  bad_delta << 0.6;
  CHECK_THROWS_AS(
      materialize_probabilities(EdgeModel::rasch(bad_beta, bad_delta)),
      std::invalid_argument);
}

TEST_CASE("proportional weights split a claim equally, 0/0 is 0") {
  const WeightScheme w = WeightScheme::proportional();
  CHECK(w.weight(0, 0, 4) == doctest::Approx(0.25));
  CHECK(w.weight(2, 1, 1) == 1.0);
  CHECK(w.weight(0, 0, 0) == 0.0);
}

TEST_CASE("compensated weights scale with degree") {
  const WeightScheme w = WeightScheme::compensated(2.0);
  CHECK(w.weight(0, 0, 4) == doctest::Approx(2.0));  // 4^{1-1/2}
  CHECK(w.weight(0, 0, 1) == doctest::Approx(1.0));
  CHECK(w.weight(0, 0, 0) == 0.0);
}

TEST_CASE("aggregation norms") {
  VectorXd x(3);
  x << 3.0, 4.0, 0.0;
  CHECK(AggregationNorm::lp(1.0)(x) == doctest::Approx(7.0));
  CHECK(AggregationNorm::lp(2.0)(x) == doctest::Approx(5.0));
  CHECK(AggregationNorm::max()(x) == doctest::Approx(4.0));
  // quasinorm, 0 < r < 1
  VectorXd e(2);
  e << 1.0, 0.0;
  CHECK(AggregationNorm::lp(0.5)(e) == doctest::Approx(1.0));
  VectorXd ones(2);
  ones << 1.0, 1.0;
  CHECK(AggregationNorm::lp(0.5)(ones) == doctest::Approx(4.0));
}

namespace {

MarketScenario valid_scenario() {
  MarketScenario s;
  s.edges = EdgeModel::homogeneous(3, 4, 0.5);
  s.claims.alpha = 2.0;
  s.claims.scales = VectorXd::Ones(4);
  s.weights = WeightScheme::proportional();
  s.norm = AggregationNorm::lp(1.0);
  return s;
}

}  // namespace

TEST_CASE("validate_scenario flags each broken invariant") {
  CHECK(validate_scenario(valid_scenario()).empty());

  MarketScenario s = valid_scenario();
  s.claims.alpha = -1.0;
  CHECK_FALSE(validate_scenario(s).empty());

  s = valid_scenario();
  s.claims.scales = VectorXd::Ones(3);  // object-count mismatch
  CHECK_FALSE(validate_scenario(s).empty());

  s = valid_scenario();
  s.claims.scales(1) = 0.0;
  CHECK_FALSE(validate_scenario(s).empty());

  s = valid_scenario();
  MatrixXd p = MatrixXd::Constant(3, 4, 0.5);
  p(0, 0) = 1.5;
  s.edges = EdgeModel::explicit_probs(p);
  CHECK_FALSE(validate_scenario(s).empty());

  s = valid_scenario();
  MatrixXd adj = MatrixXd::Zero(3, 4);
  adj(0, 0) = 0.5;  // not an indicator
  s.edges = EdgeModel::deterministic(adj);
  CHECK_FALSE(validate_scenario(s).empty());

  s = valid_scenario();
  s.edges = EdgeModel::toy(1.2);
  s.claims.scales = VectorXd::Ones(3);
  CHECK_FALSE(validate_scenario(s).empty());

  CHECK_THROWS_AS(
      [] {
        MarketScenario bad = valid_scenario();
        bad.claims.alpha = 0.0;
        require_valid(bad);
      }(),
      std::invalid_argument);
}

TEST_CASE("explicit weight columns may not over-allocate a claim") {
  MarketScenario s = valid_scenario();
  MatrixXd w = MatrixXd::Constant(3, 4, 0.5);  // column sum 1.5 on full support
  s.weights = WeightScheme::explicit_weights(w);
  CHECK_FALSE(validate_scenario(s).empty());

  w = MatrixXd::Constant(3, 4, 1.0 / 3.0);
  s.weights = WeightScheme::explicit_weights(w);
  CHECK(validate_scenario(s).empty());
}
