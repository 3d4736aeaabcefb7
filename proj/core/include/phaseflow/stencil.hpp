#pragma once

#include <span>
#include <vector>

namespace phaseflow {

/// Finite-difference weights for unit spacing: value = sum_j w[j] * f(x + (first + j) * h) / h^order.
struct Stencil {
  int first = 0;
  std::vector<double> w;
  /// 0 for node-located stencils, 0.5 when the stencil approximates the
  /// derivative at the midpoint between offsets 0 and 1.
  double shift = 0.0;

  [[nodiscard]] int last() const { return first + static_cast<int>(w.size()) - 1; }
};

/// Fornberg's algorithm: weights for the `order`-th derivative at x0 from nodes x.
std::vector<double> fornberg_weights(double x0, std::span<const double> x, int order);

/// Centered second-order stencil at a node: ell + 1 points for even ell, ell + 2 for odd ell.
Stencil centered_stencil(int ell);

/// Binomial (ell + 1)-point difference. Node-located for even ell, midpoint-located for odd ell.
Stencil compact_stencil(int ell);

/// Second-order stencil at node `pos` of a line of `count` nodes using only
/// nodes inside the line: the centered stencil where it fits, otherwise an
/// (ell + 2)-point window shifted inward.
Stencil one_sided_stencil(int ell, int pos, int count);

}  // namespace phaseflow
