#include "netrisk/json_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace netrisk {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field \"") + key + "\"");
  return *it;
}

VectorXd vector_from(const json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array");
  VectorXd v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) fail(std::string(what) + " entries must be numbers");
    v(static_cast<long>(k)) = j[k].get<double>();
  }
  return v;
}

MatrixXd matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    fail(std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = j[0].size();
  MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      fail(std::string(what) + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<long>(i), static_cast<long>(c)) = j[i][c].get<double>();
  }
  return m;
}

json matrix_to(const MatrixXd& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to(const VectorXd& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

EdgeModel edges_from_json(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "explicit")
    return EdgeModel::explicit_probs(matrix_from(field(j, "p"), "edges.p"));
  if (kind == "deterministic")
    return EdgeModel::deterministic(
        matrix_from(field(j, "adjacency"), "edges.adjacency"));
  if (kind == "toy") return EdgeModel::toy(field(j, "b").get<double>());
  if (kind == "homogeneous")
    return EdgeModel::homogeneous(field(j, "q").get<long>(),
                                  field(j, "d").get<long>(),
                                  field(j, "p").get<double>());
  if (kind == "rasch")
    return EdgeModel::rasch(vector_from(field(j, "beta"), "edges.beta"),
                            vector_from(field(j, "delta"), "edges.delta"));
  fail("unknown edge kind \"" + kind + "\"");
}

WeightScheme weights_from_json(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "proportional") return WeightScheme::proportional();
  if (kind == "compensated")
    return WeightScheme::compensated(field(j, "r").get<double>());
  if (kind == "explicit")
    return WeightScheme::explicit_weights(
        matrix_from(field(j, "w"), "weights.w"));
  fail("unknown weight kind \"" + kind + "\"");
}

AggregationNorm norm_from_json(const json& j) {
  const json& r = field(j, "r");
  if (r.is_string()) {
    if (r.get<std::string>() == "inf") return AggregationNorm::max();
    fail("norm.r must be a positive number or \"inf\"");
  }
  return AggregationNorm::lp(r.get<double>());
}

}  // namespace

MarketScenario scenario_from_json(const json& j) {
  MarketScenario s;
  s.edges = edges_from_json(field(j, "edges"));

  s.claims.alpha = field(j, "alpha").get<double>();
  const json& scales = field(j, "scales");
  if (scales.is_number()) {
    s.claims.scales = VectorXd::Constant(s.edges.objects(),
                                         scales.get<double>());
  } else {
    s.claims.scales = vector_from(scales, "scales");
  }
  const std::string dep = field(j, "dependence").get<std::string>();
  if (dep == "independent")
    s.claims.dependence = Dependence::AsymptoticallyIndependent;
  else if (dep == "dependent")
    s.claims.dependence = Dependence::FullyDependent;
  else
    fail("dependence must be \"independent\" or \"dependent\"");

  s.weights = j.contains("weights") ? weights_from_json(j["weights"])
                                    : WeightScheme::proportional();
  s.norm = j.contains("norm") ? norm_from_json(j["norm"])
                              : AggregationNorm::lp(1.0);

  const auto problems = validate_scenario(s);
  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : problems) msg += "\n  - " + p;
    fail(msg);
  }
  return s;
}

nlohmann::json scenario_to_json(const MarketScenario& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["alpha"] = s.claims.alpha;
  j["scales"] = vector_to(s.claims.scales);
  j["dependence"] =
      s.claims.dependence == Dependence::AsymptoticallyIndependent
          ? "independent"
          : "dependent";

  json e;
  switch (s.edges.kind) {
    case EdgeModel::Kind::Explicit:
      e = {{"kind", "explicit"}, {"p", matrix_to(s.edges.p)}};
      break;
    case EdgeModel::Kind::Deterministic:
      e = {{"kind", "deterministic"}, {"adjacency", matrix_to(s.edges.p)}};
      break;
    case EdgeModel::Kind::Toy:
      e = {{"kind", "toy"}, {"b", s.edges.toy_b}};
      break;
    case EdgeModel::Kind::Homogeneous:
      e = {{"kind", "homogeneous"},
           {"q", s.edges.hom_q},
           {"d", s.edges.hom_d},
           {"p", s.edges.hom_p}};
      break;
    case EdgeModel::Kind::Rasch:
      e = {{"kind", "rasch"},
           {"beta", vector_to(s.edges.beta)},
           {"delta", vector_to(s.edges.delta)}};
      break;
  }
  j["edges"] = std::move(e);

  json w;
  switch (s.weights.kind) {
    case WeightScheme::Kind::Proportional:
      w = {{"kind", "proportional"}};
      break;
    case WeightScheme::Kind::Compensated:
      w = {{"kind", "compensated"}, {"r", s.weights.r}};
      break;
    case WeightScheme::Kind::ExplicitWeights:
      w = {{"kind", "explicit"}, {"w", matrix_to(s.weights.w)}};
      break;
  }
  j["weights"] = std::move(w);

  if (s.norm.infinite)
    j["norm"] = {{"r", "inf"}};
  else
    j["norm"] = {{"r", s.norm.r}};
  return j;
}

SimConfig sim_config_from_json(const json& j, SimConfig defaults) {
  SimConfig cfg = defaults;
  if (j.contains("replicates"))
    cfg.replicates = j["replicates"].get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("confidence")) {
    cfg.confidence = j["confidence"].get<double>();
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
      fail("simulation.confidence must lie in (0,1)");
  }
  if (j.contains("thresholds")) {
    const VectorXd t = vector_from(j["thresholds"], "simulation.thresholds");
    cfg.thresholds.assign(t.data(), t.data() + t.size());
  }
  if (cfg.replicates == 0) fail("simulation.replicates must be positive");
  return cfg;
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) fail("top level must be a JSON object");
  const int version = field(j, "schema_version").get<int>();
  if (version != kSchemaVersion)
    fail("unsupported schema_version " + std::to_string(version) +
         " (expected " + std::to_string(kSchemaVersion) + ")");
  RunConfig cfg;
  cfg.scenario = scenario_from_json(j);
  if (j.contains("simulation"))
    cfg.sim = sim_config_from_json(j["simulation"]);
  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    cfg.has_sweep = true;
    cfg.sweep.parameter = field(sw, "parameter").get<std::string>();
    const VectorXd v = vector_from(field(sw, "values"), "sweep.values");
    cfg.sweep.values.assign(v.data(), v.data() + v.size());
    if (cfg.sweep.values.empty()) fail("sweep.values must be non-empty");
    // fail fast on parameter/scenario mismatches
    MarketScenario probe = cfg.scenario;
    apply_sweep_value(probe, cfg.sweep.parameter, cfg.sweep.values.front());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(std::string("JSON parse error: ") + e.what());
  }
  return run_config_from_json(j);
}

void apply_sweep_value(MarketScenario& s, const std::string& parameter,
                       double value) {
  if (parameter == "alpha") {
    s.claims.alpha = value;
  } else if (parameter == "toy_b") {
    if (s.edges.kind != EdgeModel::Kind::Toy)
      fail("sweep parameter \"toy_b\" requires toy edges");
    s.edges.toy_b = value;
  } else if (parameter == "homogeneous_p") {
    if (s.edges.kind != EdgeModel::Kind::Homogeneous)
      fail("sweep parameter \"homogeneous_p\" requires homogeneous edges");
    s.edges.hom_p = value;
  } else if (parameter == "rasch_beta_common") {
    if (s.edges.kind != EdgeModel::Kind::Rasch)
      fail("sweep parameter \"rasch_beta_common\" requires rasch edges");
    s.edges.beta.setConstant(value);
  } else if (parameter == "rasch_delta_common") {
    if (s.edges.kind != EdgeModel::Kind::Rasch)
      fail("sweep parameter \"rasch_delta_common\" requires rasch edges");
    s.edges.delta.setConstant(value);
  } else if (parameter == "weight_r") {
    if (s.weights.kind != WeightScheme::Kind::Compensated)
      fail("sweep parameter \"weight_r\" requires compensated weights");
    s.weights.r = value;
  } else if (parameter == "norm_r") {
    s.norm = AggregationNorm::lp(value);
  } else {
    fail("unknown sweep parameter \"" + parameter + "\"");
  }
  const auto problems = validate_scenario(s);
  if (!problems.empty())
    fail("sweep value " + std::to_string(value) + " for \"" + parameter +
         "\" yields an invalid scenario: " + problems.front());
}

std::string scenario_hash(const MarketScenario& s) {
  const std::string dump = scenario_to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace netrisk
