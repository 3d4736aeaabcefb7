#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "phaseflow/discretize.hpp"

namespace phaseflow::testing {

inline NormSpec weighted_all_orders() {
  // distinct weights on a few slots of every order up to 4
  return NormSpec::weighted({{"1", 1.5}, {"12", 2.0}, {"112", 0.5}, {"1122", 3.0}, {"2", 0.75}, {"222", 1.25}});
}

inline std::vector<std::pair<std::string, NormSpec>> shipped_norms() {
  return {{"operatorial", NormSpec::operatorial()},
          {"frobenius", NormSpec::frobenius()},
          {"maxcomp", NormSpec::max_component()},
          {"wfrob", weighted_all_orders()}};
}

inline std::vector<double> coefficients(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.05, 0.8);
  std::vector<double> q(static_cast<std::size_t>(k));
  for (double& v : q) v = u(rng);
  q.back() = 1.0;
  return q;
}

struct FdStats {
  double worst = 0.0;
  std::size_t checked = 0;
};

/// Central differences of the energy against the assembled gradient at `probes` random Free nodes.
template <typename FieldT>
FdStats fd_compare(const FieldT& f, const FunctionalSpec& spec, std::mt19937_64& rng, std::size_t probes) {
  const auto g = assemble_gradient(f, spec);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  std::uniform_int_distribution<std::size_t> pick(0, f.u.size() - 1);
  FdStats s;
  for (std::size_t p = 0; p < probes; ++p) {
    const std::size_t i = pick(rng);
    if (f.mask[i] == NodeState::Fixed) continue;
    const double h = 1e-6 * std::max(1.0, std::abs(f.u[i]));
    FieldT a = f, b = f;
    a.u[i] += h;
    b.u[i] -= h;
    const double fd = (assemble_energy(a, spec).total - assemble_energy(b, spec).total) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-3 * gmax});
    s.worst = std::max(s.worst, std::abs(fd - g[i]) / denom);
    ++s.checked;
  }
  return s;
}

}  // namespace phaseflow::testing
