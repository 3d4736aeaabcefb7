#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phaseflow/discretize.hpp"
#include "phaseflow/profile1d.hpp"

namespace phaseflow {

struct InterpolationReport {
  int ell = 1;
  int k = 2;
  double q = 0.0;
  double lhs = 0.0;    ///< int |u^(l)|^2 (times eps^(2l) in the scaled form)
  double rhs = 0.0;
  double ratio = 0.0;  ///< lhs / rhs; +inf when rhs = 0 < lhs
  bool pass = true;    ///< q * lhs <= rhs
};

/// q int_I |u^(l)|^2 <= |I|^(-2l) int_I W(u) + |I|^(2(k-l)) int_I |u^(k)|^2,
/// with boundary-aware second-order stencils and trapezoid quadrature.
InterpolationReport check_unit_interval(const Field1D& u, int ell, int k, const Potential& w, double q);

/// q eps^(2l) int_I |u^(l)|^2 <= int_I W(u) + eps^(2k) int_I |u^(k)|^2. Requires eps < |I|/2.
InterpolationReport check_scaled(const Field1D& u, double eps, int ell, int k, const Potential& w, double q);

enum class CandidateFamily { Fourier, Spline, SolverDescent };
std::string to_string(CandidateFamily f);
CandidateFamily parse_family(const std::string& s);

struct ThresholdOptions {
  std::size_t budget = 1000;    ///< candidate functions drawn (>= 100)
  std::uint64_t seed = 3;
  unsigned threads = 1;
  std::size_t intervals = 1000; ///< sampling of [0, 1]
  std::size_t descent_starts = 8;
  std::size_t descent_iter = 200;
};

struct ThresholdResult {
  int ell = 1;
  int k = 2;
  CandidateFamily family = CandidateFamily::Fourier;
  double r_max = 0.0;
  double q_hat = 0.0;  ///< 1 / r_max
  std::size_t evaluated = 0;
  Field1D maximizer;   ///< on [0, 1]
  std::string description;  ///< parameters of the maximizing candidate
};

/// Empirical sup of the unit-interval ratio over one candidate family.
ThresholdResult adversarial_threshold(int ell, int k, const Potential& w, CandidateFamily family,
                                      const ThresholdOptions& opts = {});

struct ThresholdEstimate {
  double q_hat = 0.0;  ///< minimum over the families
  std::vector<ThresholdResult> per_family;
  bool families_agree = false;  ///< max / min within a factor of 2
};

ThresholdEstimate estimate_threshold(int ell, int k, const Potential& w, const ThresholdOptions& opts = {});

/// Random Fourier or spline test functions on [0, 1]; draws alternate between the two families.
std::vector<Field1D> random_test_functions(std::size_t count, int k, std::uint64_t seed,
                                           std::size_t intervals = 1000);

struct SineProbe {
  double amplitude = 0.0;
  double omega = 0.0;
  double ratio = 0.0;
  bool interior = false;  ///< maximizer away from the edges of the scanned box
};

/// Grid scan of the ratio for u = A sin(omega t) on [0, 1].
SineProbe sine_probe_scan(int ell, int k, const Potential& w, const std::vector<double>& amplitudes,
                          const std::vector<double>& omegas, std::size_t intervals = 1000);

/// Largest delta with (q_l - delta) / (1 - delta) > -alpha_l q_hat_l for every l with q_l <= 0;
/// min q_l when all coefficients are positive. `alpha` empty means uniform weights over that set.
double lower_bound_delta(const std::vector<double>& q, const std::vector<double>& q_hat,
                         std::vector<double> alpha = {});

struct LowerBoundCheck {
  double energy = 0.0;
  double comparison = 0.0;  ///< energy of the same field with every coefficient set to 1
  double delta = 0.0;
  bool pass = false;
};

/// energy >= delta * comparison - 1e-9.
LowerBoundCheck functional_lower_bound_check(const Field1D& f, const FunctionalSpec& spec, double delta);
LowerBoundCheck functional_lower_bound_check(const Field2D& f, const FunctionalSpec& spec, double delta);

/// Smallest eps in `eps_grid` at which the scaled inequality with q held on every test field.
double eps0_proxy(const std::vector<Field1D>& fields, int ell, int k, const Potential& w, double q,
                  const std::vector<double>& eps_grid);

}  // namespace phaseflow
