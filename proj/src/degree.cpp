#include "netrisk/degree.hpp"

#include "netrisk/discrete.hpp"

namespace netrisk {

double DegreeLaw::moment_positive(double expo) const {
  KahanAccumulator acc;
  for (long l = 1; l < pmf.size(); ++l)
    acc.add(pmf(l) * std::pow(static_cast<double>(l), expo));
  return acc.sum();
}

namespace {

DegreeLaw poisson_binomial(const VectorXd& p, long skip) {
  const long q = p.size();
  const long n = (skip >= 0) ? q - 1 : q;
  VectorXd pmf = VectorXd::Zero(n + 1);
  pmf(0) = 1.0;
  long used = 0;
  for (long i = 0; i < q; ++i) {
    if (i == skip) continue;
    const double pi = p(i);
    for (long l = used; l >= 0; --l) {
      pmf(l + 1) += pmf(l) * pi;
      pmf(l) *= (1.0 - pi);
    }
    ++used;
  }
  return DegreeLaw{std::move(pmf)};
}

}  // namespace

DegreeLaw degree_law(const VectorXd& p_column) {
  return poisson_binomial(p_column, -1);
}

DegreeLaw degree_law_excluding(const VectorXd& p_column, long excluded) {
  if (excluded < 0 || excluded >= p_column.size())
    throw std::out_of_range("degree_law_excluding: agent index out of range");
  return poisson_binomial(p_column, excluded);
}

}  // namespace netrisk
