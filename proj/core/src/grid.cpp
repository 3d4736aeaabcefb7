#include "phaseflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "phaseflow/errors.hpp"

namespace phaseflow {

Grid2D Grid2D::rotated(double angle, std::size_t cells, double side, bool periodic, bool flip_tangent) {
  if (cells < 4) throw ArgumentError("Grid2D: need at least 4 cells per axis");
  if (!(side > 0.0)) throw ArgumentError("Grid2D: side must be positive");
  Grid2D g;
  g.normal = {std::cos(angle), std::sin(angle)};
  const double sgn = flip_tangent ? -1.0 : 1.0;
  g.tangent = {sgn * g.normal[1], -sgn * g.normal[0]};
  g.side = side;
  g.cells = cells;
  g.periodic_tangent = periodic;
  return g;
}

std::array<double, 2> Grid2D::point(std::size_t i, std::size_t j) const {
  const double si = s(i);
  const double tj = t(j);
  return {center[0] + si * tangent[0] + tj * normal[0], center[1] + si * tangent[1] + tj * normal[1]};
}

double Grid2D::weight(std::size_t i, std::size_t j) const {
  double w = h() * h();
  if (j == 0 || j + 1 == nt()) w *= 0.5;
  if (!periodic_tangent && (i == 0 || i + 1 == ns())) w *= 0.5;
  return w;
}

double Grid2D::normal_angle() const { return std::atan2(normal[1], normal[0]); }

Field1D Field1D::constant(const Grid1D& g, double value) {
  Field1D f;
  f.grid = g;
  f.u.assign(g.nodes(), value);
  f.mask.assign(g.nodes(), NodeState::Free);
  return f;
}

std::size_t Field1D::free_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), NodeState::Free));
}

Field2D Field2D::constant(const Grid2D& g, double value) {
  Field2D f;
  f.grid = g;
  f.u.assign(g.nodes(), value);
  f.mask.assign(g.nodes(), NodeState::Free);
  return f;
}

std::size_t Field2D::free_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), NodeState::Free));
}

void assign_free(std::vector<double>& dst, const std::vector<double>& src,
                 const std::vector<NodeState>& mask) {
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (mask[i] == NodeState::Free) dst[i] = src[i];
  }
}

}  // namespace phaseflow
