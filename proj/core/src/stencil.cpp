#include "phaseflow/stencil.hpp"

#include <algorithm>

#include "phaseflow/errors.hpp"

namespace phaseflow {

std::vector<double> fornberg_weights(double x0, std::span<const double> x, int order) {
  const int n = static_cast<int>(x.size()) - 1;
  if (order < 0 || n < order) throw ArgumentError("fornberg_weights: too few nodes for the order");
  const auto M = static_cast<std::size_t>(order);
  const auto N = static_cast<std::size_t>(n);
  // c[j][m]: weight of node j for derivative m
  std::vector<std::vector<double>> c(N + 1, std::vector<double>(M + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i <= N; ++i) {
    const std::size_t mn = std::min(i, M);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(N + 1);
  for (std::size_t j = 0; j <= N; ++j) w[j] = c[j][M];
  return w;
}

Stencil centered_stencil(int ell) {
  if (ell < 1) throw ArgumentError("centered_stencil: order must be positive");
  const int half = ell % 2 == 0 ? ell / 2 : (ell + 1) / 2;
  Stencil s;
  s.first = -half;
  std::vector<double> x;
  for (int j = -half; j <= half; ++j) x.push_back(j);
  s.w = fornberg_weights(0.0, x, ell);
  return s;
}

Stencil compact_stencil(int ell) {
  if (ell < 1) throw ArgumentError("compact_stencil: order must be positive");
  Stencil s;
  s.first = -(ell / 2);
  if (ell % 2 == 1) s.shift = 0.5;
  double binom = 1.0;
  for (int j = 0; j <= ell; ++j) {
    const double sign = (ell - j) % 2 == 0 ? 1.0 : -1.0;
    s.w.push_back(sign * binom);
    binom = binom * (ell - j) / (j + 1);
  }
  return s;
}

Stencil one_sided_stencil(int ell, int pos, int count) {
  Stencil c = centered_stencil(ell);
  if (pos + c.first >= 0 && pos + c.last() < count) return c;
  const int width = ell + 2;
  if (count < width) throw ArgumentError("one_sided_stencil: grid too coarse for the stencil");
  const int start = std::clamp(pos - width / 2, 0, count - width);
  Stencil s;
  s.first = start - pos;
  std::vector<double> x;
  for (int j = 0; j < width; ++j) x.push_back(s.first + j);
  s.w = fornberg_weights(0.0, x, ell);
  return s;
}

}  // namespace phaseflow
