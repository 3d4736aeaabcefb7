#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "phaseflow/grid.hpp"

namespace phaseflow::testing {

/// Sum of a few random low-frequency modes around `offset`, amplitude about `scale`.
inline Field1D smooth_field(const Grid1D& g, std::uint64_t seed, double scale = 0.8, double offset = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  Field1D f = Field1D::constant(g, 0.0);
  double a[4], p[4];
  for (int m = 0; m < 4; ++m) {
    a[m] = scale * amp(rng) / (m + 1);
    p[m] = phase(rng);
  }
  const double len = g.b - g.a;
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    double v = offset;
    for (int m = 0; m < 4; ++m) v += a[m] * std::sin((m + 1) * std::numbers::pi * (g.x(i) - g.a) / len + p[m]);
    f.u[i] = v;
  }
  return f;
}

inline Field2D smooth_field(const Grid2D& g, std::uint64_t seed, double scale = 0.8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  double a[3][3], p[3][3];
  for (auto& row : a)
    for (double& v : row) v = scale * amp(rng) / 3.0;
  for (auto& row : p)
    for (double& v : row) v = phase(rng);
  Field2D f = Field2D::constant(g, 0.0);
  const double tau = 2.0 * std::numbers::pi / g.side;
  for (std::size_t j = 0; j < g.nt(); ++j)
    for (std::size_t i = 0; i < g.ns(); ++i) {
      double v = 0.0;
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
          v += a[m][n] * std::sin(tau * m * g.s(i) + p[m][n]) * std::cos(tau * 0.5 * n * g.t(j) + p[n][m]);
      f.u[g.index(i, j)] = v;
    }
  return f;
}

}  // namespace phaseflow::testing
