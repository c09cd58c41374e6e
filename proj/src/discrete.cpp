#include "netrisk/discrete.hpp"

#include <algorithm>
#include <numeric>

namespace netrisk {

void DiscreteLaw::canonicalize() {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> v_out, p_out;
  v_out.reserve(n);
  p_out.reserve(n);
  for (std::size_t k : order) {
    if (probs[k] == 0.0) continue;
    if (!v_out.empty() && values[k] - v_out.back() <= merge_tol) {
      p_out.back() += probs[k];
    } else {
      v_out.push_back(values[k]);
      p_out.push_back(probs[k]);
    }
  }
  if (v_out.empty()) {
    v_out.push_back(0.0);
    p_out.push_back(1.0);
  }
  values = std::move(v_out);
  probs = std::move(p_out);
}

double DiscreteLaw::moment(double alpha) const {
  KahanAccumulator acc;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] <= 0.0) continue;
    acc.add(probs[k] * std::pow(values[k], alpha));
  }
  return acc.sum();
}

DiscreteLaw convolve(const DiscreteLaw& a, const DiscreteLaw& b,
                     std::size_t support_cap) {
  const std::size_t predicted = a.size() * b.size();
  if (predicted > support_cap)
    throw SupportCapExceeded("convolution support " + std::to_string(predicted) +
                             " exceeds cap " + std::to_string(support_cap));
  DiscreteLaw out;
  out.values.reserve(predicted);
  out.probs.reserve(predicted);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      out.values.push_back(a.values[i] + b.values[j]);
      out.probs.push_back(a.probs[i] * b.probs[j]);
    }
  out.canonicalize();
  return out;
}

DiscreteLaw convolve_all(const std::vector<DiscreteLaw>& laws,
                         std::size_t support_cap) {
  DiscreteLaw acc = DiscreteLaw::point(0.0);
  for (const auto& law : laws) acc = convolve(acc, law, support_cap);
  return acc;
}

}  // namespace netrisk
