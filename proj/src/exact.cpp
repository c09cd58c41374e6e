#include "netrisk/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

namespace netrisk {

const char* method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed_form";
    case Method::Enumeration: return "enumeration";
    case Method::Convolution: return "convolution";
    case Method::MonteCarlo: return "monte_carlo";
  }
  return "?";
}

double SpectralMeasure::total_mass() const {
  KahanAccumulator acc;
  for (const auto& a : atoms) acc.add(a.mass);
  return acc.sum();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

VectorXd claim_scale_roots(const ClaimSpec& c) {
  VectorXd k(c.scales.size());
  for (long j = 0; j < k.size(); ++j)
    k(j) = std::pow(c.scales(j), 1.0 / c.alpha);
  return k;
}

// alpha * (exponent of deg(j) in ||A e_j||) for degree-coupled weight schemes.
double column_norm_degree_exponent(const MarketScenario& s) {
  const double inv_rho = s.norm.infinite ? 0.0 : 1.0 / s.norm.r;
  switch (s.weights.kind) {
    case WeightScheme::Kind::Proportional:
      return s.claims.alpha * (inv_rho - 1.0);
    case WeightScheme::Kind::Compensated:
      return s.claims.alpha * (1.0 - 1.0 / s.weights.r + inv_rho);
    default:
      throw std::logic_error("degree exponent undefined for explicit weights");
  }
}

// Poisson-binomial law over the agents not contained in `excluded`.
DegreeLaw degree_law_excluding_set(const VectorXd& p_column,
                                  const std::vector<long>& excluded) {
  const long q = p_column.size();
  VectorXd rest(q - static_cast<long>(excluded.size()));
  long n = 0;
  for (long i = 0; i < q; ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) != excluded.end())
      continue;
    rest(n++) = p_column(i);
  }
  return degree_law(rest);
}

// Exposure share of every agent for one realized graph: (A K^{1/alpha} 1)_i.
VectorXd dep_exposures(const Eigen::MatrixXi& edges, const WeightScheme& w,
                       const VectorXd& kroot) {
  const long q = edges.rows();
  const long d = edges.cols();
  VectorXd f = VectorXd::Zero(q);
  for (long j = 0; j < d; ++j) {
    const long deg = edges.col(j).sum();
    if (deg == 0) continue;
    for (long i = 0; i < q; ++i)
      if (edges(i, j)) f(i) += kroot(j) * w.weight(i, j, deg);
  }
  return f;
}

// Mean and 3-sigma radius of f(graph) under graph sampling.
ScalarResult graph_mc_mean(const MatrixXd& p, std::size_t replicates,
                           std::uint64_t seed,
                           const std::function<double(const Eigen::MatrixXi&)>& f) {
  const long q = p.rows();
  const long d = p.cols();
  Eigen::MatrixXi edges(q, d);
  KahanAccumulator sum, sumsq;
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x51ED2701ull + rep)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (long j = 0; j < d; ++j)
      for (long i = 0; i < q; ++i) edges(i, j) = unif(rng) < p(i, j) ? 1 : 0;
    const double x = f(edges);
    sum.add(x);
    sumsq.add(x * x);
  }
  const double n = static_cast<double>(replicates);
  const double mean = sum.sum() / n;
  const double var = std::max(0.0, sumsq.sum() / n - mean * mean);
  return {mean, Method::MonteCarlo, 3.0 * std::sqrt(var / n)};
}

struct WorstMethod {
  Method method = Method::ClosedForm;
  double error_radius = 0.0;
  void absorb(const ScalarResult& r) {
    if (static_cast<int>(r.method) > static_cast<int>(method)) method = r.method;
    error_radius += r.error_radius;
  }
};

}  // namespace

void for_each_graph(const MatrixXd& p, int cap_edges,
                    const std::function<void(double, const Eigen::MatrixXi&)>& fn) {
  const long q = p.rows();
  const long d = p.cols();
  std::vector<std::pair<long, long>> free_edges;
  Eigen::MatrixXi base = Eigen::MatrixXi::Zero(q, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < q; ++i) {
      if (p(i, j) >= 1.0)
        base(i, j) = 1;
      else if (p(i, j) > 0.0)
        free_edges.emplace_back(i, j);
    }
  if (static_cast<int>(free_edges.size()) > cap_edges) {
    std::ostringstream os;
    os << "graph enumeration needs 2^" << free_edges.size()
       << " realizations, cap is 2^" << cap_edges;
    throw SupportCapExceeded(os.str());
  }
  const std::size_t n = free_edges.size();
  Eigen::MatrixXi edges = base;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    edges = base;
    double prob = 1.0;
    for (std::size_t e = 0; e < n; ++e) {
      const auto [i, j] = free_edges[e];
      if (mask & (1ull << e)) {
        edges(i, j) = 1;
        prob *= p(i, j);
      } else {
        prob *= 1.0 - p(i, j);
      }
    }
    if (prob > 0.0) fn(prob, edges);
  }
}

double individual_constant_ind(const MarketScenario& s, long agent) {
  const long q = s.agents();
  if (agent < 0 || agent >= q)
    throw std::out_of_range("agent index out of range");
  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;

  KahanAccumulator total;
  for (long j = 0; j < s.objects(); ++j) {
    const double pij = p(agent, j);
    if (pij == 0.0) continue;
    double e_weight_pow;  // E W_ij(deg)^alpha given i ~ j
    if (s.weights.kind == WeightScheme::Kind::ExplicitWeights) {
      e_weight_pow = std::pow(s.weights.w(agent, j), alpha);
    } else {
      const DegreeLaw cond = degree_law_excluding(p.col(j), agent);
      KahanAccumulator acc;
      for (long l = 0; l <= cond.max_degree(); ++l)
        acc.add(cond.pmf(l) *
                std::pow(s.weights.weight(agent, j, 1 + l), alpha));
      e_weight_pow = acc.sum();
    }
    total.add(s.claims.scales(j) * pij * e_weight_pow);
  }
  return total.sum();
}

ScalarResult individual_constant_dep(const MarketScenario& s, long agent,
                                     const ExactOptions& opts) {
  const long q = s.agents();
  if (agent < 0 || agent >= q)
    throw std::out_of_range("agent index out of range");
  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;
  const VectorXd kroot = claim_scale_roots(s.claims);

  std::vector<DiscreteLaw> laws;
  laws.reserve(s.objects());
  for (long j = 0; j < s.objects(); ++j) {
    const double pij = p(agent, j);
    DiscreteLaw law;
    if (pij == 0.0) {
      law = DiscreteLaw::point(0.0);
    } else if (s.weights.kind == WeightScheme::Kind::ExplicitWeights) {
      law = DiscreteLaw::two_point(kroot(j) * s.weights.w(agent, j), pij);
    } else {
      const DegreeLaw cond = degree_law_excluding(p.col(j), agent);
      law.values.push_back(0.0);
      law.probs.push_back(1.0 - pij);
      for (long l = 0; l <= cond.max_degree(); ++l) {
        law.values.push_back(kroot(j) * s.weights.weight(agent, j, 1 + l));
        law.probs.push_back(pij * cond.pmf(l));
      }
      law.canonicalize();
    }
    laws.push_back(std::move(law));
  }

  try {
    const DiscreteLaw sum = convolve_all(laws, opts.support_cap);
    return {sum.moment(alpha), Method::Convolution, 0.0};
  } catch (const SupportCapExceeded&) {
    if (!opts.allow_monte_carlo) throw;
    const WeightScheme& w = s.weights;
    return graph_mc_mean(p, opts.mc_replicates, opts.mc_seed,
                         [&](const Eigen::MatrixXi& edges) {
                           const VectorXd f = dep_exposures(edges, w, kroot);
                           return f(agent) > 0.0 ? std::pow(f(agent), alpha)
                                                 : 0.0;
                         });
  }
}

double systemic_constant_ind(const MarketScenario& s, const ExactOptions& opts) {
  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;
  const long q = s.agents();

  if (s.weights.kind == WeightScheme::Kind::ExplicitWeights) {
    if (q > opts.sphere_cap_q)
      throw SupportCapExceeded(
          "explicit-weight systemic constant needs 2^q pattern enumeration; "
          "q exceeds the cap, use Monte Carlo instead");
    KahanAccumulator total;
    VectorXd col(q);
    for (long j = 0; j < s.objects(); ++j) {
      KahanAccumulator acc;
      for (std::uint64_t b = 1; b < (1ull << q); ++b) {
        double prob = 1.0;
        for (long i = 0; i < q; ++i) {
          if (b & (1ull << i)) {
            prob *= p(i, j);
            col(i) = s.weights.w(i, j);
          } else {
            prob *= 1.0 - p(i, j);
            col(i) = 0.0;
          }
        }
        if (prob == 0.0) continue;
        acc.add(prob * std::pow(s.norm(col), alpha));
      }
      total.add(s.claims.scales(j) * acc.sum());
    }
    return total.sum();
  }

  // Degree-coupled weights: ||A e_j|| is a function of deg(j) alone.
  const double expo = column_norm_degree_exponent(s);
  KahanAccumulator total;
  for (long j = 0; j < s.objects(); ++j) {
    const DegreeLaw law = degree_law(p.col(j));
    total.add(s.claims.scales(j) * law.moment_positive(expo));
  }
  return total.sum();
}

ScalarResult systemic_constant_dep(const MarketScenario& s,
                                   const ExactOptions& opts) {
  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;
  const VectorXd kroot = claim_scale_roots(s.claims);

  const bool one_norm = !s.norm.infinite && s.norm.r == 1.0;
  if (s.weights.kind == WeightScheme::Kind::Proportional && one_norm) {
    // ||A K^{1/alpha} 1||_1 = sum_j K_j^{1/alpha} 1(deg(j) > 0); the per-object
    // indicators are independent.
    std::vector<DiscreteLaw> laws;
    laws.reserve(s.objects());
    for (long j = 0; j < s.objects(); ++j) {
      const double sj = degree_law(p.col(j)).prob_positive();
      laws.push_back(DiscreteLaw::two_point(kroot(j), sj));
    }
    try {
      return {convolve_all(laws, opts.support_cap).moment(alpha),
              Method::Convolution, 0.0};
    } catch (const SupportCapExceeded&) {
      if (!opts.allow_monte_carlo) throw;
    }
  } else {
    try {
      KahanAccumulator acc;
      for_each_graph(p, opts.graph_enum_cap_edges,
                     [&](double prob, const Eigen::MatrixXi& edges) {
                       const VectorXd f = dep_exposures(edges, s.weights, kroot);
                       const double nrm = s.norm(f);
                       if (nrm > 0.0) acc.add(prob * std::pow(nrm, alpha));
                     });
      return {acc.sum(), Method::Enumeration, 0.0};
    } catch (const SupportCapExceeded&) {
      if (!opts.allow_monte_carlo) throw;
    }
  }
  const WeightScheme& w = s.weights;
  const AggregationNorm& norm = s.norm;
  return graph_mc_mean(p, opts.mc_replicates, opts.mc_seed,
                       [&](const Eigen::MatrixXi& edges) {
                         const double nrm = norm(dep_exposures(edges, w, kroot));
                         return nrm > 0.0 ? std::pow(nrm, alpha) : 0.0;
                       });
}

ScalarResult uninsured_constant(const MarketScenario& s,
                                const ExactOptions& opts) {
  if (s.weights.kind == WeightScheme::Kind::Compensated)
    throw std::invalid_argument(
        "uninsured losses are undefined for compensated weights "
        "(column weight sums exceed 1)");
  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;
  const long q = s.agents();
  const bool proportional = s.weights.kind == WeightScheme::Kind::Proportional;

  // Per-object law of the uninsured share 1 - sum_i W_ij 1(i ~ j).
  auto residual_law = [&](long j) -> DiscreteLaw {
    if (proportional) {
      double pi_j = 1.0;
      for (long i = 0; i < q; ++i) pi_j *= 1.0 - p(i, j);
      return DiscreteLaw::two_point(1.0, pi_j);
    }
    std::vector<DiscreteLaw> parts;
    parts.reserve(q);
    for (long i = 0; i < q; ++i)
      parts.push_back(DiscreteLaw::two_point(s.weights.w(i, j), p(i, j)));
    DiscreteLaw insured = convolve_all(parts, opts.support_cap);
    DiscreteLaw residual;
    for (std::size_t k = 0; k < insured.size(); ++k) {
      residual.values.push_back(std::max(0.0, 1.0 - insured.values[k]));
      residual.probs.push_back(insured.probs[k]);
    }
    residual.canonicalize();
    return residual;
  };

  if (s.claims.dependence == Dependence::AsymptoticallyIndependent) {
    KahanAccumulator total;
    for (long j = 0; j < s.objects(); ++j)
      total.add(s.claims.scales(j) * residual_law(j).moment(alpha));
    return {total.sum(),
            proportional ? Method::ClosedForm : Method::Convolution, 0.0};
  }

  const VectorXd kroot = claim_scale_roots(s.claims);
  std::vector<DiscreteLaw> laws;
  laws.reserve(s.objects());
  for (long j = 0; j < s.objects(); ++j) {
    DiscreteLaw law = residual_law(j);
    for (auto& v : law.values) v *= kroot(j);
    law.canonicalize();
    laws.push_back(std::move(law));
  }
  try {
    return {convolve_all(laws, opts.support_cap).moment(alpha),
            Method::Convolution, 0.0};
  } catch (const SupportCapExceeded&) {
    if (!opts.allow_monte_carlo) throw;
    const WeightScheme& w = s.weights;
    return graph_mc_mean(
        p, opts.mc_replicates, opts.mc_seed,
        [&, q](const Eigen::MatrixXi& edges) {
          double sum = 0.0;
          for (long j = 0; j < edges.cols(); ++j) {
            const long deg = edges.col(j).sum();
            double insured = 0.0;
            for (long i = 0; i < q; ++i)
              if (edges(i, j)) insured += w.weight(i, j, deg);
            sum += kroot(j) * std::max(0.0, 1.0 - insured);
          }
          return sum > 0.0 ? std::pow(sum, alpha) : 0.0;
        });
  }
}

ScalarResult joint_tail_constant(const MarketScenario& s,
                                 const std::vector<long>& agents,
                                 const std::vector<double>& thresholds,
                                 const ExactOptions& opts) {
  if (agents.empty()) throw std::invalid_argument("empty agent set");
  if (agents.size() != thresholds.size())
    throw std::invalid_argument("agents and thresholds differ in length");
  const long q = s.agents();
  for (std::size_t m = 0; m < agents.size(); ++m) {
    if (agents[m] < 0 || agents[m] >= q)
      throw std::out_of_range("agent index out of range");
    if (!(thresholds[m] > 0.0))
      throw std::invalid_argument("thresholds must be positive");
    for (std::size_t l = m + 1; l < agents.size(); ++l)
      if (agents[m] == agents[l])
        throw std::invalid_argument("agent indices must be distinct");
  }

  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;
  const std::size_t k = agents.size();

  if (s.claims.dependence == Dependence::AsymptoticallyIndependent) {
    // Only realizations where every agent of the set holds the edge give a
    // positive minimum.
    KahanAccumulator total;
    for (long j = 0; j < s.objects(); ++j) {
      double p_all = 1.0;
      for (long i : agents) p_all *= p(i, j);
      if (p_all == 0.0) continue;
      const DegreeLaw rest = degree_law_excluding_set(p.col(j), agents);
      KahanAccumulator acc;
      for (long l = 0; l <= rest.max_degree(); ++l) {
        const long deg = static_cast<long>(k) + l;
        double minval = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < k; ++m)
          minval = std::min(minval, s.weights.weight(agents[m], j, deg) /
                                        thresholds[m]);
        acc.add(rest.pmf(l) * std::pow(minval, alpha));
      }
      total.add(s.claims.scales(j) * p_all * acc.sum());
    }
    return {total.sum(), Method::Enumeration, 0.0};
  }

  const VectorXd kroot = claim_scale_roots(s.claims);
  auto min_stat = [&](const Eigen::MatrixXi& edges) {
    const VectorXd f = dep_exposures(edges, s.weights, kroot);
    double minval = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < k; ++m)
      minval = std::min(minval, f(agents[m]) / thresholds[m]);
    return minval > 0.0 ? std::pow(minval, alpha) : 0.0;
  };
  try {
    KahanAccumulator acc;
    for_each_graph(p, opts.graph_enum_cap_edges,
                   [&](double prob, const Eigen::MatrixXi& edges) {
                     acc.add(prob * min_stat(edges));
                   });
    return {acc.sum(), Method::Enumeration, 0.0};
  } catch (const SupportCapExceeded&) {
    if (!opts.allow_monte_carlo) throw;
    return graph_mc_mean(p, opts.mc_replicates, opts.mc_seed, min_stat);
  }
}

SpectralMeasure spectral_measure_ind(const MarketScenario& s,
                                     const ExactOptions& opts) {
  if (s.claims.dependence != Dependence::AsymptoticallyIndependent)
    throw std::invalid_argument("spectral_measure_ind needs independent claims");
  if (s.weights.kind != WeightScheme::Kind::Proportional)
    throw std::invalid_argument("spectral_measure_ind needs proportional weights");
  const long q = s.agents();
  if (q > opts.sphere_cap_q)
    throw SupportCapExceeded("spectral enumeration cap 2^q exceeded");

  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;
  const double c_sys = systemic_constant_ind(s, opts);

  SpectralMeasure out;
  VectorXd x(q);
  for (std::uint64_t b = 1; b < (1ull << q); ++b) {
    const double h = static_cast<double>(std::popcount(b));
    for (long i = 0; i < q; ++i) x(i) = (b & (1ull << i)) ? 1.0 / h : 0.0;
    const double nrm = s.norm(x);
    KahanAccumulator acc;
    for (long j = 0; j < s.objects(); ++j) {
      double prob = 1.0;
      for (long i = 0; i < q; ++i)
        prob *= (b & (1ull << i)) ? p(i, j) : 1.0 - p(i, j);
      acc.add(s.claims.scales(j) * prob);
    }
    const double mass = std::pow(nrm, alpha) * acc.sum() / c_sys;
    if (mass > 0.0) out.atoms.push_back({x / nrm, mass});
  }
  return out;
}

SpectralMeasure spectral_support_dep(const MarketScenario& s,
                                     const ExactOptions& opts) {
  if (s.claims.dependence != Dependence::FullyDependent)
    throw std::invalid_argument("spectral_support_dep needs dependent claims");
  const MatrixXd p = materialize_probabilities(s.edges);
  const double alpha = s.claims.alpha;
  const VectorXd kroot = claim_scale_roots(s.claims);

  SpectralMeasure out;
  double total = 0.0;
  for_each_graph(p, opts.graph_enum_cap_edges,
                 [&](double prob, const Eigen::MatrixXi& edges) {
                   const VectorXd f = dep_exposures(edges, s.weights, kroot);
                   const double nrm = s.norm(f);
                   if (nrm <= 0.0) return;
                   const VectorXd dir = f / nrm;
                   const double w = prob * std::pow(nrm, alpha);
                   total += w;
                   for (auto& atom : out.atoms) {
                     if ((atom.point - dir).cwiseAbs().maxCoeff() <= 1e-10) {
                       atom.mass += w;
                       return;
                     }
                   }
                   out.atoms.push_back({dir, w});
                 });
  for (auto& atom : out.atoms) atom.mass /= total;
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const auto& a, const auto& b) { return a.mass > b.mass; });
  return out;
}

RiskConstants risk_constants(const MarketScenario& s, const ExactOptions& opts) {
  require_valid(s);
  RiskConstants rc;
  rc.regime = s.claims.dependence;
  rc.per_agent = VectorXd::Zero(s.agents());
  WorstMethod worst;

  if (rc.regime == Dependence::AsymptoticallyIndependent) {
    for (long i = 0; i < s.agents(); ++i)
      rc.per_agent(i) = individual_constant_ind(s, i);
    rc.systemic = systemic_constant_ind(s, opts);
  } else {
    for (long i = 0; i < s.agents(); ++i) {
      const ScalarResult r = individual_constant_dep(s, i, opts);
      rc.per_agent(i) = r.value;
      worst.absorb(r);
    }
    const ScalarResult r = systemic_constant_dep(s, opts);
    rc.systemic = r.value;
    worst.absorb(r);
  }
  if (s.weights.kind != WeightScheme::Kind::Compensated) {
    const ScalarResult r = uninsured_constant(s, opts);
    rc.uninsured = r.value;
    worst.absorb(r);
  }
  rc.method = worst.method;
  rc.error_radius = worst.error_radius;
  return rc;
}

}  // namespace netrisk
