#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace phaseflow {

enum class PotentialKind { QuarticStandard, Table };

/// How a tabulated potential behaves outside its abscissa range.
enum class Extrapolation {
  None,    ///< queries outside the range (beyond a 1e-12 slack) raise RangeError
  Linear,  ///< continue with the end value and end slope
};

/// Double-well potential W with wells at -1 and +1.
///
/// Table potentials use a monotone-preserving (Fritsch-Carlson) cubic
/// interpolant. The wells are pinned at construction: knots at s = -1 and
/// s = +1 are forced to zero, which keeps W(+-1) = 0 exactly and, because the
/// interpolant is monotone between knots, W >= 0 everywhere. Values are also
/// clamped below at zero.
class Potential {
 public:
  /// Default-constructed potentials are the quartic.
  Potential() = default;

  /// W(s) = (1 - s^2)^2.
  static Potential quartic();

  static Potential table(std::vector<double> abscissae, std::vector<double> values,
                         Extrapolation extrapolation = Extrapolation::None);

  /// Reads a two-column CSV with header line `s,w`. Lines starting with '#' are skipped.
  static Potential load_csv(const std::filesystem::path& path,
                            Extrapolation extrapolation = Extrapolation::None);

  [[nodiscard]] PotentialKind kind() const { return kind_; }
  [[nodiscard]] double value(double s) const;
  [[nodiscard]] double slope(double s) const;
  /// Second derivative (piecewise for tables); used by Newton-type solvers.
  [[nodiscard]] double curvature(double s) const;
  [[nodiscard]] bool is_even() const;

  [[nodiscard]] std::span<const double> knots() const { return knots_; }
  [[nodiscard]] std::span<const double> knot_values() const { return values_; }
  [[nodiscard]] Extrapolation extrapolation() const { return extrapolation_; }

  /// Short identifier used in reports: "quartic" or "table".
  [[nodiscard]] std::string describe() const;

 private:
  [[nodiscard]] std::size_t interval_of(double s) const;
  void check_range(double s) const;

  PotentialKind kind_ = PotentialKind::QuarticStandard;
  Extrapolation extrapolation_ = Extrapolation::None;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;  // Hermite slopes at the knots
  bool even_ = true;
};

double eval_potential(const Potential& w, double s);
double eval_potential_slope(const Potential& w, double s);

struct HypothesisCheck {
  bool pass = true;
  double worst_state = 0.0;   ///< sample with the smallest margin
  double worst_margin = 0.0;  ///< smallest slack found (negative means violated)
};

/// Result of scanning (H1)-(H3) on a finite sample grid. The scan does not
/// prove the hypotheses; it records the resolution it used.
struct HypothesisReport {
  HypothesisCheck zeros_only_at_wells;  ///< (H1)
  HypothesisCheck quadratic_growth;     ///< (H2), scaled by alpha
  HypothesisCheck monotone_envelope;    ///< (H3), scaled by beta
  double resolution = 0.0;              ///< largest spacing in the sorted grid
  double lower = 0.0;
  double upper = 0.0;
  std::size_t samples = 0;
  double alpha = 1.0;
  double beta = 1.0;

  [[nodiscard]] bool all_pass() const {
    return zeros_only_at_wells.pass && quadratic_growth.pass && monotone_envelope.pass;
  }
};

/// Checks, with absolute slack 1e-12:
///   (H1) W(s) = 0 only within 1e-12 of s = +-1;
///   (H2) W(s) >= alpha * min{(s+1)^2, (s-1)^2};
///   (H3) W(s) <= beta * W(t) + beta for every sampled pair |s| <= |t|.
/// Throws ArgumentError on an empty grid.
HypothesisReport check_hypotheses(const Potential& w, std::span<const double> grid,
                                  double alpha = 1.0, double beta = 1.0);

/// Uniform grid on [lower, upper] with the given step (endpoints included).
std::vector<double> uniform_samples(double lower, double upper, double step);

}  // namespace phaseflow
