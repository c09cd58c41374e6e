#pragma once

#include "netrisk/degree.hpp"
#include "netrisk/discrete.hpp"
#include "netrisk/model.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace netrisk {

enum class Method { ClosedForm, Enumeration, Convolution, MonteCarlo };

const char* method_name(Method m);

struct ExactOptions {
  std::size_t support_cap = 2'000'000;  // discrete-law convolution support
  int sphere_cap_q = 20;                // 2^q pattern enumerations
  int graph_enum_cap_edges = 25;        // free edges for full-graph enumeration
  bool allow_monte_carlo = false;       // cap overflow falls back to sampling
  std::size_t mc_replicates = 400'000;
  std::uint64_t mc_seed = 20240601;
};

struct ScalarResult {
  double value = 0.0;
  Method method = Method::ClosedForm;
  double error_radius = 0.0;  // 0 for exact methods
};

/// The {C^i}, C^S, B bundle for one dependence regime.
struct RiskConstants {
  VectorXd per_agent;
  double systemic = 0.0;
  double uninsured = 0.0;
  Dependence regime = Dependence::AsymptoticallyIndependent;
  Method method = Method::ClosedForm;
  double error_radius = 0.0;
};

struct SpectralMeasure {
  struct Atom {
    VectorXd point;  // on the unit sphere of the scenario norm
    double mass;
  };
  std::vector<Atom> atoms;

  double total_mass() const;
};

/// C^i_ind = sum_j K_j E A_ij^alpha, exact via the conditional degree law.
double individual_constant_ind(const MarketScenario& s, long agent);

/// C^i_dep = E (A K^{1/alpha} 1)_i^alpha via per-object law convolution.
ScalarResult individual_constant_dep(const MarketScenario& s, long agent,
                                     const ExactOptions& opts = {});

/// C^S_ind = sum_j K_j E ||A e_j||^alpha.
double systemic_constant_ind(const MarketScenario& s,
                             const ExactOptions& opts = {});

/// C^S_dep = E ||A K^{1/alpha} 1||^alpha.
ScalarResult systemic_constant_dep(const MarketScenario& s,
                                   const ExactOptions& opts = {});

/// Tail constant of the losses left with society; regime taken from the claims.
ScalarResult uninsured_constant(const MarketScenario& s,
                                const ExactOptions& opts = {});

/// Joint exceedance constant for P(F_{i_1} > u_1 t, ..., F_{i_k} > u_k t).
ScalarResult joint_tail_constant(const MarketScenario& s,
                                 const std::vector<long>& agents,
                                 const std::vector<double>& thresholds,
                                 const ExactOptions& opts = {});

/// Finite spectral measure for asymptotically independent claims with
/// proportional weights (2^q pattern enumeration).
SpectralMeasure spectral_measure_ind(const MarketScenario& s,
                                     const ExactOptions& opts = {});

/// Spectral atoms for fully dependent claims via graph enumeration.
SpectralMeasure spectral_support_dep(const MarketScenario& s,
                                     const ExactOptions& opts = {});

/// Full bundle for the scenario's dependence regime.
RiskConstants risk_constants(const MarketScenario& s,
                             const ExactOptions& opts = {});

/// Enumerates graph realizations of the free (non-deterministic) edges and
/// calls fn(probability, edge indicator matrix). Throws when the free edge
/// count exceeds `cap_edges`.
void for_each_graph(const MatrixXd& p, int cap_edges,
                    const std::function<void(double, const Eigen::MatrixXi&)>& fn);

}  // namespace netrisk
