#pragma once

#include "netrisk/model.hpp"
#include "netrisk/montecarlo.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace netrisk {

inline constexpr int kSchemaVersion = 1;

/// One-dimensional parameter sweep over a scenario field.
/// Recognized parameters: "alpha", "toy_b", "homogeneous_p",
/// "rasch_beta_common", "rasch_delta_common", "weight_r", "norm_r".
struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct RunConfig {
  MarketScenario scenario;
  SimConfig sim;
  bool has_sweep = false;
  SweepSpec sweep;
};

MarketScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const MarketScenario& s);

SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig defaults = {});

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Sets one scenario field by sweep-parameter name; throws when the name does
/// not apply to the scenario's edge or weight family.
void apply_sweep_value(MarketScenario& s, const std::string& parameter,
                       double value);

/// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string scenario_hash(const MarketScenario& s);

}  // namespace netrisk
