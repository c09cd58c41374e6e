#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netrisk/discrete.hpp"

#include <cmath>

using namespace netrisk;

TEST_CASE("compensated accumulator beats naive summation") {
  KahanAccumulator acc;
  acc.add(1.0);
  for (int k = 0; k < 10'000'000; ++k) acc.add(1e-16);
  CHECK(acc.sum() == doctest::Approx(1.0 + 1e-9).epsilon(1e-12));
}

TEST_CASE("point and two_point constructors") {
  const DiscreteLaw pt = DiscreteLaw::point(3.5);
  CHECK(pt.size() == 1);
  CHECK(pt.moment(2.0) == doctest::Approx(12.25));

  const DiscreteLaw tp = DiscreteLaw::two_point(2.0, 0.25);
  CHECK(tp.size() == 2);
  CHECK(tp.moment(1.0) == doctest::Approx(0.5));
  CHECK(tp.moment(0.5) == doctest::Approx(0.25 * std::sqrt(2.0)));

  CHECK(DiscreteLaw::two_point(2.0, 1.0).size() == 1);
  CHECK(DiscreteLaw::two_point(2.0, 0.0).moment(1.0) == 0.0);
}

TEST_CASE("zero support point contributes nothing for any exponent") {
  const DiscreteLaw tp = DiscreteLaw::two_point(1.0, 0.5);
  CHECK(tp.moment(0.5) == doctest::Approx(0.5));
  CHECK(std::isfinite(tp.moment(0.5)));
}

TEST_CASE("canonicalize sorts and merges near-duplicates") {
  DiscreteLaw law;
  law.values = {2.0, 1.0, 1.0 + 1e-14, 3.0};
  law.probs = {0.1, 0.2, 0.3, 0.4};
  law.canonicalize();
  REQUIRE(law.size() == 3);
  CHECK(law.values[0] == doctest::Approx(1.0));
  CHECK(law.probs[0] == doctest::Approx(0.5));
  CHECK(law.values[1] == doctest::Approx(2.0));
  CHECK(law.values[2] == doctest::Approx(3.0));
}

TEST_CASE("convolution of two coin flips") {
  const DiscreteLaw a = DiscreteLaw::two_point(1.0, 0.5);
  const DiscreteLaw c = convolve(a, a, 100);
  REQUIRE(c.size() == 3);
  CHECK(c.values[0] == 0.0);
  CHECK(c.probs[0] == doctest::Approx(0.25));
  CHECK(c.probs[1] == doctest::Approx(0.5));
  CHECK(c.probs[2] == doctest::Approx(0.25));
}

TEST_CASE("convolve_all reproduces a binomial law") {
  std::vector<DiscreteLaw> laws(6, DiscreteLaw::two_point(1.0, 0.3));
  const DiscreteLaw sum = convolve_all(laws, 10'000);
  REQUIRE(sum.size() == 7);
  double total = 0.0;
  for (int k = 0; k <= 6; ++k) {
    double binom = 1.0;
    for (int i = 0; i < k; ++i) binom *= static_cast<double>(6 - i) / (i + 1);
    const double expect = binom * std::pow(0.3, k) * std::pow(0.7, 6 - k);
    CHECK(sum.probs[k] == doctest::Approx(expect).epsilon(1e-12));
    total += sum.probs[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("support cap is enforced") {
  DiscreteLaw big;
  for (int k = 0; k < 200; ++k) {
    big.values.push_back(std::sqrt(2.0) * k);  // irrational gaps, no merging
    big.probs.push_back(1.0 / 200);
  }
  big.canonicalize();
  CHECK_THROWS_AS(convolve(big, big, 1000), SupportCapExceeded);
}

TEST_CASE("fractional moments of a convolution match direct enumeration") {
  const DiscreteLaw a = DiscreteLaw::two_point(1.5, 0.4);
  const DiscreteLaw b = DiscreteLaw::two_point(2.5, 0.7);
  const DiscreteLaw c = convolve(a, b, 100);
  for (double alpha : {0.5, 1.0, 1.7, 3.0}) {
    const double direct = 0.6 * 0.3 * 0.0 +
                          0.4 * 0.3 * std::pow(1.5, alpha) +
                          0.6 * 0.7 * std::pow(2.5, alpha) +
                          0.4 * 0.7 * std::pow(4.0, alpha);
    CHECK(c.moment(alpha) == doctest::Approx(direct).epsilon(1e-13));
  }
}
