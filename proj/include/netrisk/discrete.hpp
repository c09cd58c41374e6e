#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace netrisk {

/// Neumaier-compensated summation in fixed index order.
class KahanAccumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double sum() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SupportCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Finite nonnegative discrete law with sorted support; values closer than
/// merge_tol are collapsed into one atom.
struct DiscreteLaw {
  static constexpr double merge_tol = 1e-12;

  std::vector<double> values;
  std::vector<double> probs;

  static DiscreteLaw point(double v) { return DiscreteLaw{{v}, {1.0}}; }
  static DiscreteLaw two_point(double v, double p_v) {
    if (p_v >= 1.0) return point(v);
    if (p_v <= 0.0) return point(0.0);
    return DiscreteLaw{{0.0, v}, {1.0 - p_v, p_v}};
  }

  std::size_t size() const { return values.size(); }

  /// Sorts by value and merges near-equal support points.
  void canonicalize();

  /// E[X^alpha] with 0^alpha := 0, compensated accumulation in support order.
  double moment(double alpha) const;
};

/// Law of the sum of two independent discrete variables; throws
/// SupportCapExceeded if the pre-merge product support exceeds `support_cap`.
DiscreteLaw convolve(const DiscreteLaw& a, const DiscreteLaw& b,
                     std::size_t support_cap);

/// Sequential convolution of many laws under one support cap.
DiscreteLaw convolve_all(const std::vector<DiscreteLaw>& laws,
                         std::size_t support_cap);

}  // namespace netrisk
