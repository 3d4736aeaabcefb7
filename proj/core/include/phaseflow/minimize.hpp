#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "phaseflow/discretize.hpp"
#include "phaseflow/grid.hpp"

namespace phaseflow {

enum class MinimizerMethod {
  Newton,  ///< damped Newton on the sparse Hessian with a Levenberg shift; L-BFGS fallback
  LBFGS,
};

enum class MinimizeStatus {
  Converged,      ///< gradient infinity-norm below gtol
  Stalled,        ///< no further decrease possible in floating point
  MaxIterations,
  Unbounded,      ///< energy fell below the unbounded threshold
};

std::string to_string(MinimizeStatus s);

struct MinimizeOptions {
  MinimizerMethod method = MinimizerMethod::Newton;
  double gtol = 1e-8;
  std::size_t max_iter = 5000;
  double unbounded_below = -1e6;
  /// A stalled run counts as converged when its gradient is below this.
  double stall_gtol = 1e-5;
  std::size_t lbfgs_memory = 12;
  /// Multiplier on the floating-point floor of the gradient (see MinimizeResult::gtol_effective).
  double roundoff_factor = 4.0;
};

struct MinimizeResult {
  std::vector<double> u;  ///< full nodal values (Fixed entries untouched)
  double energy = 0.0;
  double grad_inf = 0.0;
  std::size_t iterations = 0;
  /// max(gtol, floor) where floor = roundoff_factor * eps * max_i sum_j |H_ij u_j|:
  /// the gradient cannot be resolved below it in double precision. Runs stop as
  /// converged below this floor once a step leaves the energy unchanged to 1e-12.
  double gtol_effective = 0.0;
  MinimizeStatus status = MinimizeStatus::MaxIterations;
  std::vector<double> history;

  [[nodiscard]] bool converged(const MinimizeOptions& o) const {
    return status == MinimizeStatus::Converged ||
           (status == MinimizeStatus::Stalled && grad_inf < o.stall_gtol);
  }
};

/// Minimizes over the Free entries of `u0`; returns the best iterate found.
MinimizeResult minimize(const DiscreteFunctional& f, const std::vector<double>& u0,
                        const std::vector<NodeState>& mask, const MinimizeOptions& opts = {});

}  // namespace phaseflow
