#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netrisk/exact.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace netrisk;

namespace {

MarketScenario toy(double alpha, double b,
                   Dependence dep = Dependence::AsymptoticallyIndependent) {
  MarketScenario s;
  s.edges = EdgeModel::toy(b);
  s.claims.alpha = alpha;
  s.claims.scales = VectorXd::Ones(3);
  s.claims.dependence = dep;
  return s;
}

MarketScenario homogeneous(double alpha, double p, long q = 5, long d = 5) {
  MarketScenario s;
  s.edges = EdgeModel::homogeneous(q, d, p);
  s.claims.alpha = alpha;
  s.claims.scales = VectorXd::Ones(d);
  return s;
}

double binom(long n, long k) {
  double b = 1.0;
  for (long i = 0; i < k; ++i)
    b *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  return b;
}

double toy_agent_constant(double alpha, double b) {
  const double two = std::pow(2.0, 1.0 - alpha);
  return 1.0 + b * (two - 1.0) + b * b * (two - 1.0) +
         b * b * b * (std::pow(3.0, 1.0 - alpha) + 1.0 -
                      std::pow(2.0, 2.0 - alpha));
}

MarketScenario random_scenario(std::mt19937_64& rng, long max_cells) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long q, d;
  do {
    q = 1 + static_cast<long>(rng() % 4);
    d = 1 + static_cast<long>(rng() % 4);
  } while (q * d > max_cells);
  MatrixXd p(q, d);
  for (long i = 0; i < q; ++i)
    for (long j = 0; j < d; ++j) p(i, j) = unif(rng);
  MarketScenario s;
  s.edges = EdgeModel::explicit_probs(p);
  s.claims.scales = VectorXd::Ones(d);
  for (long j = 0; j < d; ++j) s.claims.scales(j) = 0.5 + 1.5 * unif(rng);
  const double alphas[] = {0.5, 0.7, 1.0, 1.3, 2.0, 3.0};
  s.claims.alpha = alphas[rng() % 6];
  return s;
}

}  // namespace

TEST_CASE("toy individual constant closed form") {
  for (double alpha : {0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0})
    for (int bi = 0; bi <= 10; ++bi) {
      const double b = bi / 10.0;
      const MarketScenario s = toy(alpha, b);
      for (long agent = 0; agent < 3; ++agent)
        CHECK(std::abs(individual_constant_ind(s, agent) -
                       toy_agent_constant(alpha, b)) <= 1e-12);
    }
}

TEST_CASE("toy systemic constants are b-free") {
  for (double alpha : {0.5, 1.0, 2.0, 3.5})
    for (double b : {0.0, 0.3, 0.7, 1.0}) {
      CHECK(std::abs(systemic_constant_ind(toy(alpha, b)) - 3.0) <= 1e-12);
      const ScalarResult dep = systemic_constant_dep(
          toy(alpha, b, Dependence::FullyDependent));
      CHECK(dep.method != Method::MonteCarlo);
      CHECK(std::abs(dep.value - std::pow(3.0, alpha)) <= 1e-12);
    }
}

TEST_CASE("homogeneous closed forms, q = d = 5") {
  const long q = 5, d = 5;
  for (double alpha : {0.8, 1.0, 1.5, 3.0})
    for (double p : {0.0, 0.1, 0.35, 0.6, 0.9, 1.0}) {
      const MarketScenario s = homogeneous(alpha, p);

      double ci = 0.0;
      for (long l = 0; l < q; ++l)
        ci += std::pow(1.0 + l, -alpha) * binom(q - 1, l) * std::pow(p, l) *
              std::pow(1.0 - p, q - 1 - l);
      ci *= d * p;
      CHECK(std::abs(individual_constant_ind(s, 2) - ci) <= 1e-10);

      const double seen = 1.0 - std::pow(1.0 - p, q);
      CHECK(std::abs(systemic_constant_ind(s) - d * seen) <= 1e-10);

      MarketScenario sd = s;
      sd.claims.dependence = Dependence::FullyDependent;
      double cs_dep = 0.0;
      for (long l = 1; l <= d; ++l)
        cs_dep += binom(d, l) * std::pow(static_cast<double>(l), alpha) *
                  std::pow(seen, l) * std::pow(1.0 - seen, d - l);
      const ScalarResult dep = systemic_constant_dep(sd);
      CHECK(dep.method != Method::MonteCarlo);
      CHECK(std::abs(dep.value - cs_dep) <= 1e-10);
    }
}

TEST_CASE("deterministic 2-regular and block graphs split agents by degree") {
  MatrixXd a1 = MatrixXd::Zero(6, 6);
  for (long i = 0; i < 6; ++i) {
    a1(i, i) = 1.0;
    a1(i, (i + 1) % 6) = 1.0;
  }
  MatrixXd a2 = MatrixXd::Zero(6, 6);
  for (long blk : {0L, 3L}) {
    a2(blk + 0, blk + 0) = a2(blk + 0, blk + 1) = 1.0;
    a2(blk + 1, blk + 0) = a2(blk + 1, blk + 1) = 1.0;
    a2(blk + 2, blk + 1) = a2(blk + 2, blk + 2) = 1.0;
  }
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    MarketScenario s;
    s.claims.alpha = alpha;
    s.claims.scales = VectorXd::Ones(6);

    s.edges = EdgeModel::deterministic(a1);
    for (long i = 0; i < 6; ++i)
      CHECK(std::abs(individual_constant_ind(s, i) -
                     std::pow(2.0, 1.0 - alpha)) <= 1e-14);

    s.edges = EdgeModel::deterministic(a2);
    const double low = std::pow(2.0, -alpha) + std::pow(3.0, -alpha);
    const double high = 1.0 + std::pow(3.0, -alpha);
    for (long i = 0; i < 6; ++i) {
      const double expect = (i % 3 == 2) ? high : low;
      CHECK(std::abs(individual_constant_ind(s, i) - expect) <= 1e-14);
    }
  }
}

TEST_CASE("engine matches the 2^{qd} enumeration oracle") {
  std::mt19937_64 rng(20240815);
  ExactOptions opts;
  for (int rep = 0; rep < 20; ++rep) {
    MarketScenario s = random_scenario(rng, 12);
    const oracle::Constants ref = oracle::constants(s);

    for (long i = 0; i < s.agents(); ++i) {
      CHECK(std::abs(individual_constant_ind(s, i) - ref.individual_ind(i)) <=
            1e-10);
      MarketScenario sd = s;
      sd.claims.dependence = Dependence::FullyDependent;
      const ScalarResult dep = individual_constant_dep(sd, i, opts);
      CHECK(dep.method != Method::MonteCarlo);
      CHECK(std::abs(dep.value - ref.individual_dep(i)) <= 1e-10);
    }
    CHECK(std::abs(systemic_constant_ind(s, opts) - ref.systemic_ind) <= 1e-10);
    {
      MarketScenario sd = s;
      sd.claims.dependence = Dependence::FullyDependent;
      const ScalarResult dep = systemic_constant_dep(sd, opts);
      CHECK(dep.method != Method::MonteCarlo);
      CHECK(std::abs(dep.value - ref.systemic_dep) <= 1e-10);

      const ScalarResult unins_dep = uninsured_constant(sd, opts);
      CHECK(std::abs(unins_dep.value - ref.uninsured_dep) <= 1e-10);
    }
    CHECK(std::abs(uninsured_constant(s, opts).value - ref.uninsured_ind) <=
          1e-10);
  }
}

TEST_CASE("oracle equivalence holds for compensated weights and r-norms") {
  std::mt19937_64 rng(99);
  ExactOptions opts;
  for (int rep = 0; rep < 10; ++rep) {
    MarketScenario s = random_scenario(rng, 9);
    s.weights = WeightScheme::compensated(2.0);
    s.norm = (rep % 3 == 0) ? AggregationNorm::max()
                            : AggregationNorm::lp(rep % 3 == 1 ? 2.0 : 1.0);
    const oracle::Constants ref = oracle::constants(s);
    for (long i = 0; i < s.agents(); ++i)
      CHECK(std::abs(individual_constant_ind(s, i) - ref.individual_ind(i)) <=
            1e-10);
    CHECK(std::abs(systemic_constant_ind(s, opts) - ref.systemic_ind) <= 1e-10);
    MarketScenario sd = s;
    sd.claims.dependence = Dependence::FullyDependent;
    const ScalarResult dep = systemic_constant_dep(sd, opts);
    CHECK(dep.method != Method::MonteCarlo);
    CHECK(std::abs(dep.value - ref.systemic_dep) <= 1e-10);
  }
}

TEST_CASE("oracle equivalence for explicit weights") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ExactOptions opts;
  for (int rep = 0; rep < 8; ++rep) {
    MarketScenario s = random_scenario(rng, 9);
    MatrixXd w(s.agents(), s.objects());
    for (long i = 0; i < s.agents(); ++i)
      for (long j = 0; j < s.objects(); ++j)
        w(i, j) = unif(rng) / static_cast<double>(s.agents());
    s.weights = WeightScheme::explicit_weights(w);
    const oracle::Constants ref = oracle::constants(s);
    for (long i = 0; i < s.agents(); ++i)
      CHECK(std::abs(individual_constant_ind(s, i) - ref.individual_ind(i)) <=
            1e-10);
    CHECK(std::abs(systemic_constant_ind(s, opts) - ref.systemic_ind) <= 1e-10);
  }
}

TEST_CASE("joint tail constants match the oracle, k = 2") {
  std::mt19937_64 rng(5150);
  ExactOptions opts;
  for (int rep = 0; rep < 10; ++rep) {
    MarketScenario s = random_scenario(rng, 10);
    if (s.agents() < 2) continue;
    const std::vector<long> agents = {0, 1};
    const std::vector<double> u = {0.7, 1.3};
    const ScalarResult ind = joint_tail_constant(s, agents, u, opts);
    CHECK(std::abs(ind.value - oracle::joint_ind(s, agents, u)) <= 1e-10);

    MarketScenario sd = s;
    sd.claims.dependence = Dependence::FullyDependent;
    const ScalarResult dep = joint_tail_constant(sd, agents, u, opts);
    CHECK(dep.method != Method::MonteCarlo);
    CHECK(std::abs(dep.value - oracle::joint_dep(s, agents, u)) <= 1e-10);
  }
}

TEST_CASE("spectral measure matches the oracle and sums to one") {
  std::mt19937_64 rng(777);
  ExactOptions opts;
  for (int rep = 0; rep < 8; ++rep) {
    MarketScenario s = random_scenario(rng, 10);
    s.weights = WeightScheme::proportional();
    const SpectralMeasure sm = spectral_measure_ind(s, opts);
    if (sm.atoms.empty()) continue;
    CHECK(std::abs(sm.total_mass() - 1.0) <= 1e-12);

    const auto ref = oracle::spectral_ind(s);
    REQUIRE(sm.atoms.size() == ref.size());
    for (const auto& atom : sm.atoms) {
      double best = 1e9;
      double ref_mass = 0.0;
      for (const auto& r : ref) {
        const double dist = (r.point - atom.point).norm();
        if (dist < best) {
          best = dist;
          ref_mass = r.mass;
        }
      }
      CHECK(best <= 1e-9);
      CHECK(std::abs(atom.mass - ref_mass) <= 1e-10);
    }
  }
}

TEST_CASE("independent regime conserves total claim mass") {
  std::mt19937_64 rng(31337);
  ExactOptions opts;
  for (int rep = 0; rep < 15; ++rep) {
    MarketScenario s = random_scenario(rng, 12);
    const double total_k = s.claims.scales.sum();
    CHECK(std::abs(systemic_constant_ind(s, opts) +
                   uninsured_constant(s, opts).value - total_k) <= 1e-9);
  }
}

TEST_CASE("dependent regime splits mass all-or-nothing only") {
  // E S^a + E (c-S)^a = c^a forces S in {0, c} a.s. for a != 1, so the
  // insured and uninsured dependent constants conserve total mass exactly
  // when the graph is degenerate, and fall short (a > 1) otherwise.
  ExactOptions opts;
  MarketScenario s;
  s.edges = EdgeModel::explicit_probs(MatrixXd::Constant(1, 2, 0.5));
  s.claims.alpha = 2.0;
  s.claims.scales = VectorXd::Ones(2);
  s.claims.dependence = Dependence::FullyDependent;
  const double lhs = systemic_constant_dep(s, opts).value +
                     uninsured_constant(s, opts).value;
  CHECK(lhs == doctest::Approx(3.0).epsilon(1e-12));  // vs total (1+1)^2 = 4

  s.edges = EdgeModel::explicit_probs(MatrixXd::Constant(1, 2, 1.0));
  CHECK(systemic_constant_dep(s, opts).value +
            uninsured_constant(s, opts).value ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("graph enumeration cap falls back to sampling only when allowed") {
  MarketScenario s = homogeneous(1.5, 0.4, 6, 6);  // 36 free edges
  s.claims.dependence = Dependence::FullyDependent;
  s.norm = AggregationNorm::lp(2.0);  // blocks the convolution shortcut
  ExactOptions strict;
  strict.allow_monte_carlo = false;
  CHECK_THROWS_AS(systemic_constant_dep(s, strict), SupportCapExceeded);

  ExactOptions relaxed;
  relaxed.allow_monte_carlo = true;
  relaxed.mc_replicates = 50'000;
  const ScalarResult r = systemic_constant_dep(s, relaxed);
  CHECK(r.method == Method::MonteCarlo);
  CHECK(r.error_radius > 0.0);
}

TEST_CASE("risk_constants bundles the per-regime values") {
  const MarketScenario s = homogeneous(2.0, 0.3);
  const RiskConstants rc = risk_constants(s);
  CHECK(rc.regime == Dependence::AsymptoticallyIndependent);
  REQUIRE(rc.per_agent.size() == 5);
  for (long i = 0; i < 5; ++i)
    CHECK(rc.per_agent(i) ==
          doctest::Approx(individual_constant_ind(s, i)).epsilon(1e-13));
  CHECK(rc.systemic == doctest::Approx(systemic_constant_ind(s)).epsilon(1e-13));
  CHECK(rc.uninsured ==
        doctest::Approx(uninsured_constant(s).value).epsilon(1e-13));
}
