#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phaseflow/discretize.hpp"
#include "phaseflow/minimize.hpp"

namespace phaseflow {

/// Transition problem on (-T, T) in rescaled variables (eps = 1).
struct ProfileProblem {
  FunctionalSpec spec;
  double T = 8.0;
  double bc_band = 0.5;      ///< width of the clamped end bands; raised to (2k+1)h if smaller
  double h = 0.01;           ///< grid spacing, kept fixed across T schedules so nodes nest
  double left_value = -1.0;  ///< band value near -T
  double right_value = 1.0;  ///< band value near +T

  [[nodiscard]] Grid1D grid() const;
  [[nodiscard]] double band() const;
  /// Validates T > 1/2, h > 0, and eps = 1.
  void validate() const;
};

enum class ProfileStatus { Ok, NotConverged, Unbounded };
std::string to_string(ProfileStatus s);

struct ProfileSolution {
  Field1D field;
  double energy = 0.0;
  EnergyReport report;
  bool converged = false;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  ProfileStatus status = ProfileStatus::NotConverged;
  std::string diagnostic;
  double multistart_spread = 0.0;  ///< max - min energy over converged starts
  std::size_t starts = 1;
};

struct ProfileOptions {
  MinimizeOptions minimizer;
  bool multistart = true;  ///< ramp widths 0.5, 1, 2 plus two seeded perturbations
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// C^(k-1) ramp of cell2d rescaled to width `width` (default 1), banded.
Field1D ramp_init(const ProfileProblem& p, double width = 1.0);

/// Minimizes the discrete energy over the Free nodes. With `init` the solver
/// starts there (plus the multi-start set when enabled); Unbounded is
/// reported when the energy drops below the threshold, turns negative (a
/// negative-energy transition can be repeated to push the energy to -infinity),
/// or the derivative oscillates at the grid scale.
ProfileSolution solve_profile(const ProfileProblem& p, const std::optional<Field1D>& init = std::nullopt,
                              const ProfileOptions& opts = {});

struct MEstimate {
  double m_hat = 0.0;
  std::vector<std::pair<double, double>> table;  ///< (T, m(T))
  bool converged = false;                        ///< |m(T_last) - m(T_prev)| < tol
  bool monotone = true;                          ///< table nonincreasing within 1e-6
  bool unbounded = false;
  std::string diagnostic;
  std::vector<ProfileSolution> solutions;
};

/// m(T) along an increasing schedule, warm-starting each T from the previous
/// solution extended by the band values.
MEstimate estimate_m(const FunctionalSpec& spec, const std::vector<double>& T_schedule, double tol,
                     const ProfileOptions& opts = {}, double h = 0.01);

/// estimate_m with q_1 = ... = q_(k-1) = 0.
MEstimate estimate_m_k(int k, const Potential& w, const std::vector<double>& T_schedule, double tol,
                       const ProfileOptions& opts = {}, double h = 0.01);

/// Default spacing used for order k (coarser for k >= 3, where the top-order
/// stencil's floating-point floor dominates).
double default_profile_h(int k);

struct TailReport {
  std::vector<double> max_abs;  ///< max |u^(l)| over |t| >= 0.9 T, l = 1..max(1, k-1)
  double threshold = 1e-3;
  bool pass = true;
};

TailReport tail_diagnostics(const ProfileSolution& sol, int k, double threshold = 1e-3);

/// Number of sign changes of the discrete first derivative, ignoring |u'| below `floor`.
std::size_t derivative_sign_changes(const Field1D& f, double floor = 1e-6);

/// Linear interpolation of a 1D field at t; values beyond the grid take the end values.
double sample_field(const Field1D& f, double t);

}  // namespace phaseflow
