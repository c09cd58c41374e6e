#include "netrisk/poisson.hpp"

#include <cmath>

namespace netrisk {

namespace {

constexpr std::size_t kMaxTerms = 1'000'000;

double min_one_inv(double lambda) {
  return lambda > 1.0 ? 1.0 / lambda : 1.0;
}

// Truncated Poisson pmf with the tail mass below `tol` dropped.
std::vector<double> truncated_poisson_pmf(double lambda, double tol) {
  std::vector<double> pmf;
  double term = std::exp(-lambda);
  double cum = 0.0;
  for (std::size_t n = 0; n < kMaxTerms; ++n) {
    pmf.push_back(term);
    cum += term;
    if (static_cast<double>(n) >= lambda && 1.0 - cum < tol) return pmf;
    term *= lambda / static_cast<double>(n + 1);
  }
  throw std::runtime_error("poisson pmf truncation tolerance unreachable");
}

}  // namespace

double poisson_moment(double lambda, double exponent, MomentShift shift,
                      double tol) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (shift == MomentShift::None && exponent < 0.0)
    throw std::invalid_argument(
        "E X^kappa diverges for kappa < 0 (mass at X = 0)");

  auto f = [&](double n) {
    const double base = shift == MomentShift::PlusOne ? 1.0 + n : n;
    if (base == 0.0) return exponent == 0.0 ? 1.0 : 0.0;
    return std::pow(base, exponent);
  };

  if (lambda == 0.0) return f(0.0);

  KahanAccumulator acc;
  double pmf = std::exp(-lambda);
  for (std::size_t n = 0; n < kMaxTerms; ++n) {
    const double dn = static_cast<double>(n);
    const double fn = f(dn);
    acc.add(pmf * fn);
    // Past the mode, f(m) <= f(n) c^{m-n} with c the one-step growth factor
    // (c = 1 for nonincreasing integrands), so the remaining series is
    // dominated by a geometric one.
    if (dn >= lambda && fn > 0.0) {
      double c = 1.0;
      if (exponent > 0.0) {
        const double base = shift == MomentShift::PlusOne
                                ? (dn + 2.0) / (dn + 1.0)
                                : (dn + 1.0) / std::max(dn, 1.0);
        c = std::pow(base, exponent);
      }
      const double ratio = lambda / (dn + 1.0) * c;
      if (ratio < 0.5 && pmf * fn * ratio / (1.0 - ratio) < tol)
        return acc.sum();
    }
    pmf *= lambda / (dn + 1.0);
  }
  throw std::runtime_error("poisson_moment did not converge within term cap");
}

PoissonApprox approx_individual_constant(const MarketScenario& s, long agent,
                                         double tol) {
  if (s.weights.kind != WeightScheme::Kind::Proportional)
    throw std::invalid_argument(
        "poisson approximation requires proportional weights");
  if (s.claims.dependence != Dependence::AsymptoticallyIndependent)
    throw std::invalid_argument(
        "approx_individual_constant requires independent claims");
  const MatrixXd p = materialize_probabilities(s.edges);
  const long q = s.agents();
  if (agent < 0 || agent >= q)
    throw std::out_of_range("agent index out of range");
  const double alpha = s.claims.alpha;

  PoissonApprox out;
  KahanAccumulator value, bound;
  for (long j = 0; j < s.objects(); ++j) {
    double lambda_ij = 0.0, sq = 0.0;
    for (long i = 0; i < q; ++i) {
      if (i == agent) continue;
      lambda_ij += p(i, j);
      sq += p(i, j) * p(i, j);
    }
    const double kj = s.claims.scales(j);
    value.add(kj * p(agent, j) *
              poisson_moment(lambda_ij, -alpha, MomentShift::PlusOne, tol));
    bound.add(kj * p(agent, j) * min_one_inv(lambda_ij) * sq);
    out.lambda += lambda_ij;
  }
  out.value = value.sum();
  out.bound = bound.sum();
  return out;
}

PoissonApprox approx_systemic_constant(const MarketScenario& s) {
  if (s.weights.kind != WeightScheme::Kind::Proportional)
    throw std::invalid_argument(
        "poisson approximation requires proportional weights");
  if (s.norm.infinite || s.norm.r != 1.0)
    throw std::invalid_argument(
        "systemic poisson approximation is stated for the 1-norm only");
  if (s.claims.dependence != Dependence::AsymptoticallyIndependent)
    throw std::invalid_argument(
        "approx_systemic_constant requires independent claims");
  const MatrixXd p = materialize_probabilities(s.edges);

  PoissonApprox out;
  KahanAccumulator value, bound;
  for (long j = 0; j < s.objects(); ++j) {
    const double lambda_j = p.col(j).sum();
    const double sq = p.col(j).squaredNorm();
    const double kj = s.claims.scales(j);
    value.add(kj * (1.0 - std::exp(-lambda_j)));
    bound.add(kj * min_one_inv(lambda_j) * sq);
    out.lambda += lambda_j;
  }
  out.value = value.sum();
  out.bound = bound.sum();
  return out;
}

DepApprox approx_dep_constants(const MarketScenario& s, double tol) {
  if (s.weights.kind != WeightScheme::Kind::Proportional)
    throw std::invalid_argument(
        "poisson approximation requires proportional weights");
  if (s.norm.infinite || s.norm.r != 1.0)
    throw std::invalid_argument(
        "dependent poisson approximation is stated for the 1-norm only");
  if (s.claims.dependence != Dependence::FullyDependent)
    throw std::invalid_argument("approx_dep_constants requires dependent claims");

  const MatrixXd p = materialize_probabilities(s.edges);
  const long q = s.agents();
  const long d = s.objects();
  const double alpha = s.claims.alpha;
  VectorXd kroot(d);
  double kroot_sum = 0.0;
  for (long j = 0; j < d; ++j) {
    kroot(j) = std::pow(s.claims.scales(j), 1.0 / alpha);
    kroot_sum += kroot(j);
  }
  const double scale_factor =
      static_cast<double>(d) * std::pow(kroot_sum, alpha);
  constexpr std::size_t cap = 2'000'000;

  DepApprox out;

  // Systemic: independent surrogate indicators 1(X_j > 0), X_j ~ Pois(lambda_j).
  {
    std::vector<DiscreteLaw> laws;
    KahanAccumulator bound;
    double lambda_total = 0.0;
    for (long j = 0; j < d; ++j) {
      const double lambda_j = p.col(j).sum();
      laws.push_back(
          DiscreteLaw::two_point(kroot(j), 1.0 - std::exp(-lambda_j)));
      bound.add(min_one_inv(lambda_j) * p.col(j).squaredNorm());
      lambda_total += lambda_j;
    }
    out.systemic.value = convolve_all(laws, cap).moment(alpha);
    out.systemic.bound = scale_factor * bound.sum();
    out.systemic.lambda = lambda_total;
  }

  // Per agent: surrogate exposure sum_j K_j^{1/a} 1(i~j) / (1 + X_j^i).
  for (long i = 0; i < q; ++i) {
    std::vector<DiscreteLaw> laws;
    KahanAccumulator bound;
    double lambda_total = 0.0;
    for (long j = 0; j < d; ++j) {
      double lambda_ij = 0.0, sq = 0.0;
      for (long k = 0; k < q; ++k) {
        if (k == i) continue;
        lambda_ij += p(k, j);
        sq += p(k, j) * p(k, j);
      }
      DiscreteLaw law;
      const double pij = p(i, j);
      law.values.push_back(0.0);
      law.probs.push_back(1.0 - pij);
      if (pij > 0.0) {
        const auto pmf = truncated_poisson_pmf(lambda_ij, tol);
        double used = 0.0;
        for (std::size_t n = 0; n < pmf.size(); ++n) {
          law.values.push_back(kroot(j) / (1.0 + static_cast<double>(n)));
          law.probs.push_back(pij * pmf[n]);
          used += pmf[n];
        }
        law.probs[0] += pij * (1.0 - used);  // truncated tail mass
      }
      law.canonicalize();
      laws.push_back(std::move(law));
      bound.add(min_one_inv(lambda_ij) * sq);
      lambda_total += lambda_ij;
    }
    PoissonApprox a;
    a.value = convolve_all(laws, cap).moment(alpha);
    a.bound = scale_factor * bound.sum();
    a.lambda = lambda_total;
    out.individual.push_back(a);
  }
  return out;
}

UninsuredPoissonApprox uninsured_poisson(const MarketScenario& s, double tol) {
  if (s.weights.kind != WeightScheme::Kind::Proportional)
    throw std::invalid_argument(
        "uninsured poisson approximation requires proportional weights");
  const MatrixXd p = materialize_probabilities(s.edges);
  const long q = s.agents();
  const long d = s.objects();
  const double alpha = s.claims.alpha;

  VectorXd pi(d);
  double tv = 0.0, pi_sum = 0.0;
  for (long j = 0; j < d; ++j) {
    double prod = 1.0;
    for (long i = 0; i < q; ++i) prod *= 1.0 - p(i, j);
    pi(j) = prod;
    tv += prod * prod;
    pi_sum += prod;
  }

  UninsuredPoissonApprox out;
  KahanAccumulator ind;
  for (long j = 0; j < d; ++j)
    ind.add(s.claims.scales(j) *
            poisson_moment(pi(j), alpha, MomentShift::None, tol));
  out.tail_constant_ind = {ind.sum(), tv, pi_sum};

  const bool all_equal = [&] {
    for (long j = 1; j < d; ++j)
      if (s.claims.scales(j) != s.claims.scales(0)) return false;
    return true;
  }();
  double dep_value;
  if (all_equal) {
    // sum of the X_j is Poisson with the summed mean
    dep_value = s.claims.scales(0) *
                poisson_moment(pi_sum, alpha, MomentShift::None, tol);
  } else {
    std::vector<DiscreteLaw> laws;
    for (long j = 0; j < d; ++j) {
      const double kr = std::pow(s.claims.scales(j), 1.0 / alpha);
      const auto pmf = truncated_poisson_pmf(pi(j), tol);
      DiscreteLaw law;
      for (std::size_t n = 0; n < pmf.size(); ++n) {
        law.values.push_back(kr * static_cast<double>(n));
        law.probs.push_back(pmf[n]);
      }
      law.canonicalize();
      laws.push_back(std::move(law));
    }
    dep_value = convolve_all(laws, 2'000'000).moment(alpha);
  }
  out.tail_constant_dep = {dep_value, tv, pi_sum};
  return out;
}

std::pair<double, double> noninsured_count_approx(const MarketScenario& s) {
  const MatrixXd p = materialize_probabilities(s.edges);
  const long q = s.agents();
  double lambda = 0.0, sq = 0.0;
  for (long j = 0; j < s.objects(); ++j) {
    double prod = 1.0;
    for (long i = 0; i < q; ++i) prod *= 1.0 - p(i, j);
    lambda += prod;
    sq += prod * prod;
  }
  return {lambda, min_one_inv(lambda) * sq};
}

}  // namespace netrisk
