#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netrisk/json_io.hpp"

using namespace netrisk;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "schema_version": 1,
    "alpha": 1.5,
    "scales": [1.0, 2.0, 0.5],
    "dependence": "independent",
    "edges": {"kind": "toy", "b": 0.4},
    "weights": {"kind": "proportional"},
    "norm": {"r": 1}
  })");
}

}  // namespace

TEST_CASE("config round trip preserves the scenario") {
  const RunConfig cfg = run_config_from_json(base_config());
  CHECK(cfg.scenario.claims.alpha == 1.5);
  CHECK(cfg.scenario.claims.scales(1) == 2.0);
  CHECK(cfg.scenario.edges.kind == EdgeModel::Kind::Toy);
  CHECK(cfg.scenario.edges.toy_b == 0.4);

  const json dumped = scenario_to_json(cfg.scenario);
  const MarketScenario again = scenario_from_json(dumped);
  CHECK(scenario_hash(again) == scenario_hash(cfg.scenario));
}

TEST_CASE("scalar scales broadcast over the objects") {
  json j = base_config();
  j["scales"] = 2.5;
  const RunConfig cfg = run_config_from_json(j);
  REQUIRE(cfg.scenario.claims.scales.size() == 3);
  CHECK(cfg.scenario.claims.scales(2) == 2.5);
}

TEST_CASE("hash distinguishes scenarios and is stable") {
  const MarketScenario a = scenario_from_json(base_config());
  json j = base_config();
  j["alpha"] = 1.6;
  const MarketScenario b = scenario_from_json(j);
  CHECK(scenario_hash(a) == scenario_hash(a));
  CHECK(scenario_hash(a) != scenario_hash(b));
  CHECK(scenario_hash(a).size() == 16);
}

TEST_CASE("missing fields and bad values are rejected with context") {
  json j = base_config();
  j.erase("alpha");
  CHECK_THROWS_WITH_AS(run_config_from_json(j),
                       doctest::Contains("alpha"), std::invalid_argument);

  j = base_config();
  j["schema_version"] = 99;
  CHECK_THROWS_WITH_AS(run_config_from_json(j),
                       doctest::Contains("schema_version"),
                       std::invalid_argument);

  j = base_config();
  j["dependence"] = "comonotone";
  CHECK_THROWS_AS(run_config_from_json(j), std::invalid_argument);

  j = base_config();
  j["edges"] = {{"kind", "smallworld"}};
  CHECK_THROWS_AS(run_config_from_json(j), std::invalid_argument);

  j = base_config();
  j["edges"]["b"] = 1.5;  // invalid toy parameter
  CHECK_THROWS_AS(run_config_from_json(j), std::invalid_argument);
}

TEST_CASE("simulation block parsing with defaults and overrides") {
  json j = base_config();
  j["simulation"] = {{"replicates", 5000},
                     {"seed", 99},
                     {"confidence", 0.95},
                     {"thresholds", {10.0, 100.0}}};
  const RunConfig cfg = run_config_from_json(j);
  CHECK(cfg.sim.replicates == 5000);
  CHECK(cfg.sim.seed == 99);
  CHECK(cfg.sim.confidence == 0.95);
  REQUIRE(cfg.sim.thresholds.size() == 2);
  CHECK(cfg.sim.thresholds[1] == 100.0);

  const RunConfig defaults = run_config_from_json(base_config());
  CHECK(defaults.sim.replicates == SimConfig{}.replicates);
}

TEST_CASE("sweep block validation") {
  json j = base_config();
  j["sweep"] = {{"parameter", "toy_b"}, {"values", {0.0, 0.5, 1.0}}};
  const RunConfig cfg = run_config_from_json(j);
  REQUIRE(cfg.has_sweep);
  CHECK(cfg.sweep.parameter == "toy_b");
  CHECK(cfg.sweep.values.size() == 3);

  j["sweep"]["parameter"] = "homogeneous_p";  // wrong edge family
  CHECK_THROWS_AS(run_config_from_json(j), std::invalid_argument);

  j["sweep"] = {{"parameter", "toy_b"}, {"values", {1.7}}};  // out of range
  CHECK_THROWS_AS(run_config_from_json(j), std::invalid_argument);
}

TEST_CASE("apply_sweep_value mutates the right field") {
  MarketScenario s = scenario_from_json(base_config());
  apply_sweep_value(s, "alpha", 3.0);
  CHECK(s.claims.alpha == 3.0);
  apply_sweep_value(s, "toy_b", 0.9);
  CHECK(s.edges.toy_b == 0.9);
  apply_sweep_value(s, "norm_r", 2.0);
  CHECK(s.norm.r == 2.0);
  CHECK_THROWS_AS(apply_sweep_value(s, "rasch_beta_common", 0.5),
                  std::invalid_argument);

  MarketScenario r;
  r.edges = EdgeModel::rasch(VectorXd::Constant(2, 0.5),
                             VectorXd::Constant(3, 0.5));
  r.claims.alpha = 2.0;
  r.claims.scales = VectorXd::Ones(3);
  apply_sweep_value(r, "rasch_beta_common", 0.25);
  CHECK(r.edges.beta(1) == 0.25);
  apply_sweep_value(r, "rasch_delta_common", 0.75);
  CHECK(r.edges.delta(2) == 0.75);
}
