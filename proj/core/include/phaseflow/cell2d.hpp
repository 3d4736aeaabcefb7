#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phaseflow/boundary_profile.hpp"
#include "phaseflow/discretize.hpp"
#include "phaseflow/minimize.hpp"

namespace phaseflow {

BoundaryProfile build_boundary_profile(int k);

/// How the two faces parallel to the normal are treated.
enum class LateralMode {
  Periodic,  ///< fields are periodic along the tangent; only the faces orthogonal to nu carry data
  Clamped,   ///< all four faces carry the ramp data (upper-biased: the lateral strips add energy)
};

struct CellProblem {
  double angle = 0.5 * 3.14159265358979323846;  ///< normal nu = (cos, sin)
  double eps = 0.1;
  FunctionalSpec spec;   ///< eps inside spec is ignored
  std::size_t cells = 0; ///< N; 0 picks ceil(6 / eps)
  double r_band = 0.1;   ///< raised to 2k*h if smaller
  LateralMode lateral = LateralMode::Periodic;
  bool flip_tangent = false;

  [[nodiscard]] std::size_t resolved_cells() const;
  [[nodiscard]] Grid2D grid() const;
  [[nodiscard]] double band() const;
};

struct CellOptions {
  MinimizeOptions minimizer;
  int perturbed_starts = 3;
  std::size_t explore_iter = 80;  ///< iteration cap for perturbed starts; the best start then runs to completion
  std::uint64_t seed = 11;
  unsigned threads = 1;
  std::size_t max_cells = 512;  ///< resolution budget per axis
};

enum class CellStatus { Ok, NotConverged, Unbounded };
std::string to_string(CellStatus s);

struct CellResult {
  double angle = 0.0;
  double eps = 0.0;
  double energy = 0.0;  ///< g_eps(nu)
  double init_energy = 0.0;
  Field2D solution;
  EnergyReport report;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  double spread = 0.0;  ///< multi-start energy spread
  CellStatus status = CellStatus::NotConverged;
  std::string diagnostic;
};

/// The admissible ramp field u(x) = ubar((x . nu) / eps) with the boundary bands Fixed.
Field2D boundary_field(const CellProblem& p);

/// Minimizes the cell energy. Requires h <= eps/6 (ArgumentError otherwise).
CellResult solve_cell(const CellProblem& p, const CellOptions& opts = {},
                      const std::optional<Field2D>& init = std::nullopt);

struct GEstimate {
  double angle = 0.0;
  double g_hat = 0.0;
  std::vector<std::pair<double, double>> table;  ///< (eps, g_eps)
  bool converged = false;
  bool unbounded = false;
  std::string diagnostic;
  CellResult last;
};

/// Continuation along a decreasing eps schedule; each eps starts from the
/// previous solution stretched along nu. Perturbed starts run at the first eps only. Throws ResolutionError ("scale
/// floor") when an eps needs more than max_cells per axis.
GEstimate estimate_g(double angle, const FunctionalSpec& spec, const std::vector<double>& eps_schedule,
                     double tol, const CellOptions& opts = {}, const CellProblem& base = {});

/// estimate_g over several normals, in parallel across angles (opts.threads workers).
std::vector<GEstimate> anisotropy_scan(const FunctionalSpec& spec, const std::vector<double>& angles,
                                       const std::vector<double>& eps_schedule, double tol,
                                       const CellOptions& opts = {}, const CellProblem& base = {});

struct BasisCheck {
  double g_plus = 0.0;
  double g_minus = 0.0;
  double spread = 0.0;
  bool pass = false;
  std::string warning;
};

/// Solves the cell with tangent +nu1 and -nu1; pass if the spread is below 1e-3 * max(g, 1).
BasisCheck basis_independence_check(double angle, const FunctionalSpec& spec, double eps,
                                    const CellOptions& opts = {}, std::size_t cells_plus = 0,
                                    std::size_t cells_minus = 0);

struct PositivityReport {
  bool pass = false;
  double min_g = 0.0;
  std::vector<double> offending_angles;
};

/// pass iff every entry is bounded and min g > 10 * tol. Throws ArgumentError on an empty scan.
PositivityReport positivity_check(const std::vector<GEstimate>& scan, double tol);

/// Fraction of the potential term stored in the strip |x . nu| <= width around the interface.
double potential_concentration(const CellResult& r, const FunctionalSpec& spec, double width = 0.25);

/// max over rows with |t| <= width of (max - min) of u along the tangent.
double lateral_variation(const Field2D& f, double width = 0.25);

/// (angle, g_hat) rows for the polar table.
std::vector<std::pair<double, double>> polar_table(const std::vector<GEstimate>& scan);

}  // namespace phaseflow
