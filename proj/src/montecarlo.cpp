#include "netrisk/montecarlo.hpp"

#include "netrisk/discrete.hpp"
#include "netrisk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace netrisk {

namespace {

unsigned worker_count(std::size_t replicates) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("RISK_ENGINE_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  const std::size_t min_chunk = 4096;
  const std::size_t usable = std::max<std::size_t>(1, replicates / min_chunk);
  return static_cast<unsigned>(std::min<std::size_t>(n, usable));
}

struct Sampler {
  MatrixXd p;
  VectorXd kroot;
  double alpha;
  bool dependent;
  long q, d;
  const WeightScheme* weights;
  const AggregationNorm* norm;

  explicit Sampler(const MarketScenario& s)
      : p(materialize_probabilities(s.edges)),
        kroot(s.objects()),
        alpha(s.claims.alpha),
        dependent(s.claims.dependence == Dependence::FullyDependent),
        q(s.agents()),
        d(s.objects()),
        weights(&s.weights),
        norm(&s.norm) {
    for (long j = 0; j < d; ++j)
      kroot(j) = std::pow(s.claims.scales(j), 1.0 / alpha);
  }

  // Draw order is fixed (edges column by column, then claims) so that every
  // estimator sees the same market realization for a given replicate index.
  template <class Rng>
  void draw_graph(Rng& rng, Eigen::MatrixXi& edges,
                  Eigen::VectorXi& deg) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    deg.setZero();
    for (long j = 0; j < d; ++j)
      for (long i = 0; i < q; ++i) {
        const int e = unif(rng) < p(i, j) ? 1 : 0;
        edges(i, j) = e;
        deg(j) += e;
      }
  }

  template <class Rng>
  void draw_claims(Rng& rng, VectorXd& v) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // 1 - U keeps the base in (0, 1]; U itself can be exactly zero
    if (dependent) {
      const double z = std::pow(1.0 - unif(rng), -1.0 / alpha);
      for (long j = 0; j < d; ++j) v(j) = kroot(j) * z;
    } else {
      for (long j = 0; j < d; ++j)
        v(j) = kroot(j) * std::pow(1.0 - unif(rng), -1.0 / alpha);
    }
  }

  template <class Rng>
  double loss(Rng& rng, Target target, Eigen::MatrixXi& edges,
              Eigen::VectorXi& deg, VectorXd& v, VectorXd& exposure) const {
    draw_graph(rng, edges, deg);
    draw_claims(rng, v);
    switch (target.kind) {
      case Target::Kind::Agent: {
        double total = 0.0;
        const long i = target.agent;
        for (long j = 0; j < d; ++j)
          if (edges(i, j))
            total += weights->weight(i, j, deg(j)) * v(j);
        return total;
      }
      case Target::Kind::Aggregate: {
        exposure.setZero();
        for (long j = 0; j < d; ++j) {
          if (deg(j) == 0) continue;
          for (long i = 0; i < q; ++i)
            if (edges(i, j))
              exposure(i) += weights->weight(i, j, deg(j)) * v(j);
        }
        return (*norm)(exposure);
      }
      case Target::Kind::Uninsured: {
        double total = 0.0;
        for (long j = 0; j < d; ++j)
          if (deg(j) == 0) total += v(j);
        return total;
      }
    }
    throw std::logic_error("unreachable target kind");
  }
};

template <class Fn>
void parallel_replicates(std::size_t replicates, Fn&& per_worker) {
  const unsigned workers = worker_count(replicates);
  if (workers <= 1) {
    per_worker(0u, std::size_t{0}, replicates);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (replicates + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = std::min<std::size_t>(w * chunk, replicates);
    const std::size_t hi = std::min<std::size_t>(lo + chunk, replicates);
    if (lo >= hi) break;
    pool.emplace_back([&per_worker, w, lo, hi] { per_worker(w, lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<double> default_thresholds(const MarketScenario& s, int points) {
  if (points < 2) throw std::invalid_argument("need at least two thresholds");
  double max_kroot = 0.0;
  for (long j = 0; j < s.objects(); ++j)
    max_kroot = std::max(
        max_kroot, std::pow(s.claims.scales(j), 1.0 / s.claims.alpha));
  const double lo = 10.0 * max_kroot;
  const double hi = 1000.0 * max_kroot;
  std::vector<double> t(points);
  for (int k = 0; k < points; ++k)
    t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
  return t;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("quantile level must lie in (0,1)");
  // Acklam's rational approximation, relative error below 1.15e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double u = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
            c[5]) /
           ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1.0);
  }
  if (p > 1.0 - plow) {
    const double u = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
             c[5]) /
           ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1.0);
  }
  const double u = p - 0.5;
  const double t = u * u;
  return (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t +
          a[5]) *
         u /
         (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
}

std::vector<double> sample_target(const MarketScenario& s, Target target,
                                  const SimConfig& cfg) {
  require_valid(s);
  if (target.kind == Target::Kind::Agent &&
      (target.agent < 0 || target.agent >= s.agents()))
    throw std::out_of_range("agent index out of range");
  const Sampler sampler(s);
  std::vector<double> out(cfg.replicates);
  parallel_replicates(cfg.replicates, [&](unsigned, std::size_t lo,
                                          std::size_t hi) {
    Eigen::MatrixXi edges(sampler.q, sampler.d);
    Eigen::VectorXi deg(sampler.d);
    VectorXd v(sampler.d), exposure(sampler.q);
    for (std::size_t n = lo; n < hi; ++n) {
      auto rng = replicate_rng(cfg.seed, n);
      out[n] = sampler.loss(rng, target, edges, deg, v, exposure);
    }
  });
  return out;
}

std::vector<TailEstimate> empirical_tail_constant(const MarketScenario& s,
                                                  Target target,
                                                  const SimConfig& cfg) {
  require_valid(s);
  std::vector<double> thresholds =
      cfg.thresholds.empty() ? default_thresholds(s) : cfg.thresholds;
  std::sort(thresholds.begin(), thresholds.end());
  for (double t : thresholds)
    if (!(t > 0.0)) throw std::invalid_argument("thresholds must be positive");

  const Sampler sampler(s);
  const unsigned workers = worker_count(cfg.replicates);
  std::vector<std::vector<std::size_t>> counts(
      workers, std::vector<std::size_t>(thresholds.size(), 0));
  parallel_replicates(cfg.replicates, [&](unsigned w, std::size_t lo,
                                          std::size_t hi) {
    Eigen::MatrixXi edges(sampler.q, sampler.d);
    Eigen::VectorXi deg(sampler.d);
    VectorXd v(sampler.d), exposure(sampler.q);
    auto& mine = counts[w];
    for (std::size_t n = lo; n < hi; ++n) {
      auto rng = replicate_rng(cfg.seed, n);
      const double loss = sampler.loss(rng, target, edges, deg, v, exposure);
      // thresholds are sorted ascending, so stop at the first miss
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (loss <= thresholds[k]) break;
        ++mine[k];
      }
    }
  });

  const double nrep = static_cast<double>(cfg.replicates);
  const double z = normal_quantile(0.5 + cfg.confidence / 2.0);
  std::vector<TailEstimate> out;
  out.reserve(thresholds.size());
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    std::size_t n_exceed = 0;
    for (unsigned w = 0; w < workers; ++w) n_exceed += counts[w][k];
    TailEstimate e;
    e.threshold = thresholds[k];
    e.n_exceed = n_exceed;
    const double scale = std::pow(thresholds[k], s.claims.alpha);
    const double phat = static_cast<double>(n_exceed) / nrep;
    e.point = scale * phat;
    if (n_exceed == 0) {
      // one-sided Clopper-Pearson upper bound at the configured confidence
      e.one_sided = true;
      e.half_width = scale * (1.0 - std::pow(1.0 - cfg.confidence, 1.0 / nrep));
    } else {
      e.half_width = scale * z * std::sqrt(phat * (1.0 - phat) / nrep);
    }
    out.push_back(e);
  }
  return out;
}

double empirical_var(const std::vector<double>& samples, double gamma) {
  const double n = static_cast<double>(samples.size());
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
  if (n * gamma < 20.0)
    throw std::invalid_argument(
        "too few expected tail samples for a VaR estimate (need N*gamma >= 20)");
  std::vector<double> sorted(samples);
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil((1.0 - gamma) * n)) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + idx, sorted.end());
  return sorted[idx];
}

double empirical_cote(const std::vector<double>& samples, double gamma) {
  const double n = static_cast<double>(samples.size());
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
  if (n * gamma < 50.0)
    throw std::invalid_argument(
        "too few expected tail samples for a CoTE estimate (need N*gamma >= "
        "50)");
  const std::size_t k =
      std::max<std::size_t>(1, static_cast<std::size_t>(n * gamma));
  std::vector<double> sorted(samples);
  std::nth_element(sorted.begin(), sorted.end() - k, sorted.end(),
                   std::less<double>());
  KahanAccumulator acc;
  for (auto it = sorted.end() - k; it != sorted.end(); ++it) acc.add(*it);
  return acc.sum() / static_cast<double>(k);
}

std::vector<VectorXd> sample_exposures_above(const MarketScenario& s,
                                             const SimConfig& cfg,
                                             double threshold) {
  require_valid(s);
  const Sampler sampler(s);
  const unsigned workers = worker_count(cfg.replicates);
  std::vector<std::vector<std::pair<std::size_t, VectorXd>>> hits(workers);
  parallel_replicates(cfg.replicates, [&](unsigned w, std::size_t lo,
                                          std::size_t hi) {
    Eigen::MatrixXi edges(sampler.q, sampler.d);
    Eigen::VectorXi deg(sampler.d);
    VectorXd v(sampler.d), exposure(sampler.q);
    for (std::size_t n = lo; n < hi; ++n) {
      auto rng = replicate_rng(cfg.seed, n);
      sampler.draw_graph(rng, edges, deg);
      sampler.draw_claims(rng, v);
      exposure.setZero();
      for (long j = 0; j < sampler.d; ++j) {
        if (deg(j) == 0) continue;
        for (long i = 0; i < sampler.q; ++i)
          if (edges(i, j))
            exposure(i) += sampler.weights->weight(i, j, deg(j)) * v(j);
      }
      if ((*sampler.norm)(exposure) > threshold)
        hits[w].emplace_back(n, exposure);
    }
  });
  std::vector<VectorXd> out;
  for (auto& block : hits)
    for (auto& [n, e] : block) out.push_back(std::move(e));
  return out;
}

double CountDistribution::tv_to_poisson(double lambda) const {
  double diff = 0.0;
  double term = std::exp(-lambda);
  double covered = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    diff += std::abs(pmf[k] - term);
    covered += term;
    term *= lambda / static_cast<double>(k + 1);
  }
  return 0.5 * (diff + (1.0 - covered));
}

CountDistribution count_uninsured(const MarketScenario& s,
                                  const SimConfig& cfg) {
  require_valid(s);
  const Sampler sampler(s);
  const unsigned workers = worker_count(cfg.replicates);
  const std::size_t bins = static_cast<std::size_t>(sampler.d) + 1;
  std::vector<std::vector<std::size_t>> hist(
      workers, std::vector<std::size_t>(bins, 0));
  parallel_replicates(cfg.replicates, [&](unsigned w, std::size_t lo,
                                          std::size_t hi) {
    Eigen::MatrixXi edges(sampler.q, sampler.d);
    Eigen::VectorXi deg(sampler.d);
    auto& mine = hist[w];
    for (std::size_t n = lo; n < hi; ++n) {
      auto rng = replicate_rng(cfg.seed, n);
      sampler.draw_graph(rng, edges, deg);
      long zero = 0;
      for (long j = 0; j < sampler.d; ++j)
        if (deg(j) == 0) ++zero;
      ++mine[static_cast<std::size_t>(zero)];
    }
  });
  CountDistribution out;
  out.replicates = cfg.replicates;
  out.pmf.assign(bins, 0.0);
  for (unsigned w = 0; w < workers; ++w)
    for (std::size_t k = 0; k < bins; ++k)
      out.pmf[k] += static_cast<double>(hist[w][k]);
  for (auto& x : out.pmf) x /= static_cast<double>(cfg.replicates);
  return out;
}

}  // namespace netrisk
