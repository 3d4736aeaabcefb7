#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace phaseflow {

/// Uniform grid on [a, b]: nodes x_i = a + i*h for i = 0..n+1, h = (b - a)/(n + 1).
/// The n nodes strictly inside are the interior nodes; the endpoints are nodes too.
struct Grid1D {
  double a = -1.0;
  double b = 1.0;
  std::size_t n = 0;

  [[nodiscard]] double h() const { return (b - a) / static_cast<double>(n + 1); }
  [[nodiscard]] std::size_t nodes() const { return n + 2; }
  [[nodiscard]] double x(std::size_t i) const { return a + h() * static_cast<double>(i); }
  /// Trapezoid weight of node i.
  [[nodiscard]] double weight(std::size_t i) const {
    return (i == 0 || i == n + 1) ? 0.5 * h() : h();
  }
};

/// Square of side `side` centered at `center`, sampled in the orthonormal frame
/// (tangent, normal). Frame coordinates (s, t) map to center + s*tangent + t*normal.
/// The normal axis carries N + 1 nodes including both faces; the tangent axis
/// carries N nodes when periodic, otherwise N + 1.
struct Grid2D {
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> normal{0.0, 1.0};
  std::array<double, 2> tangent{1.0, 0.0};
  double side = 1.0;
  std::size_t cells = 0;  ///< N
  bool periodic_tangent = true;

  /// Builds the frame for the unit normal at `angle` (radians from e1).
  /// The tangent is (sin, -cos), or its opposite when flip_tangent is set.
  static Grid2D rotated(double angle, std::size_t cells, double side = 1.0, bool periodic = true,
                        bool flip_tangent = false);

  [[nodiscard]] double h() const { return side / static_cast<double>(cells); }
  [[nodiscard]] std::size_t ns() const { return periodic_tangent ? cells : cells + 1; }
  [[nodiscard]] std::size_t nt() const { return cells + 1; }
  [[nodiscard]] std::size_t nodes() const { return ns() * nt(); }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return j * ns() + i; }
  [[nodiscard]] double s(std::size_t i) const { return -0.5 * side + h() * static_cast<double>(i); }
  [[nodiscard]] double t(std::size_t j) const { return -0.5 * side + h() * static_cast<double>(j); }
  [[nodiscard]] std::array<double, 2> point(std::size_t i, std::size_t j) const;
  [[nodiscard]] double weight(std::size_t i, std::size_t j) const;
  [[nodiscard]] double normal_angle() const;
};

enum class NodeState : std::uint8_t { Free = 0, Fixed = 1 };

struct Field1D {
  Grid1D grid;
  std::vector<double> u;
  std::vector<NodeState> mask;

  static Field1D constant(const Grid1D& g, double value);
  [[nodiscard]] std::size_t free_count() const;
};

struct Field2D {
  Grid2D grid;
  std::vector<double> u;
  std::vector<NodeState> mask;

  static Field2D constant(const Grid2D& g, double value);
  [[nodiscard]] std::size_t free_count() const;
};

/// Overwrites only the Free entries of `dst` with `src`.
void assign_free(std::vector<double>& dst, const std::vector<double>& src,
                 const std::vector<NodeState>& mask);

}  // namespace phaseflow
