#pragma once

#include <vector>

namespace phaseflow {

/// The fixed C^(k-1) transition ramp: -1 for t <= -1/8, +1 for t >= 1/8 and,
/// in between, the odd polynomial of degree 2k - 1 with k - 1 vanishing
/// derivatives at +-1/8, i.e. u(t) = c * int_0^(8t) (1 - s^2)^(k-1) ds.
class BoundaryProfile {
 public:
  /// Builds the ramp and verifies its invariants; 1 <= k <= 4.
  static BoundaryProfile build(int k);

  [[nodiscard]] int k() const { return k_; }
  /// Coefficients a_j of t^j on [-1/8, 1/8].
  [[nodiscard]] const std::vector<double>& coefficients() const { return coef_; }
  [[nodiscard]] double value(double t) const { return derivative(t, 0); }
  /// order-th derivative (0 for the value); zero outside [-1/8, 1/8] for order >= 1.
  [[nodiscard]] double derivative(double t, int order) const;

 private:
  int k_ = 1;
  std::vector<double> coef_;
};

}  // namespace phaseflow
