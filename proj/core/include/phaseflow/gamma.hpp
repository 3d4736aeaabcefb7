#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phaseflow/cell2d.hpp"
#include "phaseflow/profile1d.hpp"

namespace phaseflow {

struct Segment {
  std::array<double, 2> a{0.0, 0.0};
  std::array<double, 2> b{1.0, 0.0};
  [[nodiscard]] double length() const;
  /// Normal angle in [0, pi) for even potentials, else the left normal of a -> b.
  [[nodiscard]] double normal_angle() const;
};

struct InterfaceSpec {
  int dim = 1;
  std::vector<double> jumps;      ///< 1D jump locations
  std::vector<Segment> segments;  ///< 2D polygonal pieces

  static InterfaceSpec jumps_1d(std::vector<double> at);
  /// Flat interface through the center of the unit square with normal angle `angle`.
  static InterfaceSpec flat(double angle, double length = 1.0);
  void validate() const;
};

/// Angle -> g lookup by nearest angle (within pi/32), pi-periodic when `even`.
struct GTable {
  std::vector<std::pair<double, double>> rows;
  bool even = true;

  [[nodiscard]] double lookup(double angle) const;
  static GTable load_csv(const std::string& path);
  static GTable constant(double g);
};

double predicted_limit(const InterfaceSpec& iface, double m_hat);
double predicted_limit(const InterfaceSpec& iface, const GTable& g);

struct GammaRow {
  double eps = 0.0;
  double energy = 0.0;
  double recovery_energy = 0.0;
  double l2dist = 0.0;
  std::size_t transitions = 0;
  bool converged = false;
};

struct GammaReport {
  std::vector<GammaRow> rows;
  double predicted = 0.0;
  bool unbounded = false;
  std::string diagnostic;
  bool liminf_ok = false;    ///< energy >= 0.95 F0 at the smallest eps
  bool limsup_ok = false;    ///< recovery <= 1.05 F0 at the smallest eps
  bool trend_ok = false;     ///< |E_(i+1) - F0| <= |E_i - F0| + 0.01 F0
  bool ordered = false;      ///< energy <= recovery + tolerance at every eps
  std::vector<Field1D> fields_1d;
  std::vector<Field2D> fields_2d;
};

struct Gamma1DOptions {
  double a = -1.0;
  double b = 1.0;
  std::size_t n = 8000;
  double left = -1.0;
  double right = 1.0;
  MinimizeOptions minimizer;
  bool keep_fields = true;
  /// Optimal profile in rescaled variables; when set, the recovery field is
  /// U((x - mid) / eps) instead of the fixed ramp.
  std::optional<Field1D> profile;
};

/// Minimizes F_eps on (a, b) with u = left / right on k + 1 end nodes, warm-starting
/// each eps from the previous minimizer rescaled about the midpoint.
/// `predicted` is F0 (m_hat per forced jump, 0 without one).
GammaReport run_gamma_1d(const FunctionalSpec& spec, const std::vector<double>& eps_schedule, double predicted,
                         const Gamma1DOptions& opts = {});

struct Gamma2DOptions {
  std::size_t cells = 0;  ///< 0 picks ceil(6 / eps) per eps
  MinimizeOptions minimizer;
  ProfileOptions profile;  ///< for the 1D profile used by the recovery field
  double profile_T = 8.0;
  bool keep_fields = false;
};

/// 1D problem along the normal, coefficients q_l |nu^(l)|_l^2, rescaled so the
/// top coefficient is 1: m = scale * m(spec) and U(t) = V(t / scale).
struct Effective1D {
  FunctionalSpec spec;
  double scale = 1.0;
};
Effective1D effective_1d_spec(const FunctionalSpec& spec, double angle);

/// Flat interface with normal `angle` through the unit square (frame aligned
/// with the interface). (a) minimized energy with the recovery field imposed
/// on the whole boundary, (b) recovery field U(x . nu / eps) with U the
/// optimal 1D profile of effective_1d_spec.
GammaReport run_gamma_2d(const FunctionalSpec& spec, double angle, const std::vector<double>& eps_schedule,
                         double predicted, const Gamma2DOptions& opts = {});

struct ProbeReport {
  bool declined = false;
  std::string reason;
  std::vector<double> distances;  ///< L2 distance to the sign projection
  std::vector<std::size_t> transitions;
  bool distance_decreasing = false;
  bool transitions_stable = false;
};

/// Declines unless every energy stays below `bound` (default 4 * max(E_first, 1)).
ProbeReport compactness_probe(const std::vector<Field1D>& fields, const std::vector<double>& energies,
                              std::optional<double> bound = std::nullopt);

/// Crossings from <= -1/2 to >= 1/2 or back.
std::size_t count_transitions(const std::vector<double>& u);
/// L2 distance to the step jumping at `at` from `left` to `right`.
double l2_to_step(const Field1D& f, double at, double left = -1.0, double right = 1.0);
double l2_to_sign(const Field1D& f);

}  // namespace phaseflow
