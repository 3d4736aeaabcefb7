#include "phaseflow/interpolation.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/Splines>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "phaseflow/errors.hpp"
#include "phaseflow/parallel.hpp"
#include "phaseflow/stencil.hpp"

namespace phaseflow {
namespace {

// derivative of order ell at every node of a line, boundary-aware
std::vector<double> line_derivative(std::span<const double> u, double h, int ell) {
  const int n = static_cast<int>(u.size());
  std::vector<double> d(u.size());
  const double scale = std::pow(h, -ell);
  for (int i = 0; i < n; ++i) {
    const Stencil s = one_sided_stencil(ell, i, n);
    double acc = 0.0;
    for (std::size_t j = 0; j < s.w.size(); ++j) acc += s.w[j] * u[static_cast<std::size_t>(i + s.first + static_cast<int>(j))];
    d[static_cast<std::size_t>(i)] = acc * scale;
  }
  return d;
}

double trapezoid_sq(const Grid1D& g, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += g.weight(i) * v[i] * v[i];
  return s;
}

double potential_integral(const Grid1D& g, std::span<const double> u, const Potential& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.weight(i) * w.value(u[i]);
  return s;
}

void check_orders(int ell, int k) {
  if (k < 2 || k > 8) throw ArgumentError("interpolation: k must be in 2..8");
  if (ell < 1 || ell > k - 1) throw ArgumentError("interpolation: ell must be in 1..k-1");
}

InterpolationReport make_report(int ell, int k, double q, double lhs, double rhs) {
  InterpolationReport r;
  r.ell = ell;
  r.k = k;
  r.q = q;
  r.lhs = lhs;
  r.rhs = rhs;
  if (rhs > 0.0) {
    r.ratio = lhs / rhs;
  } else {
    r.ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  r.pass = q * lhs <= rhs * (1.0 + 1e-12) + 1e-300;
  return r;
}

Grid1D unit_grid(std::size_t intervals) { return Grid1D{0.0, 1.0, intervals - 1}; }

std::mt19937_64 candidate_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  return std::exp(d(rng));
}

struct Candidate {
  std::vector<double> u;
  std::string description;
};

Candidate fourier_candidate(const Grid1D& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double f = log_uniform(rng, 0.02, 16.0);
  const int harmonics = 1 + static_cast<int>(rng() % 3);
  const double amp = log_uniform(rng, 0.05, 4.0) * std::max(1.0, 0.25 / f);
  const double offset = 1.5 * unif(rng);
  std::vector<double> a(static_cast<std::size_t>(harmonics));
  std::vector<double> b(static_cast<std::size_t>(harmonics));
  std::vector<double> phase(static_cast<std::size_t>(harmonics));
  double norm = 0.0;
  for (int m = 0; m < harmonics; ++m) {
    a[static_cast<std::size_t>(m)] = normal(rng) / (m + 1);
    phase[static_cast<std::size_t>(m)] = std::numbers::pi * unif(rng);
    norm += std::abs(a[static_cast<std::size_t>(m)]);
  }
  Candidate c;
  c.u.resize(g.nodes());
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    const double t = g.x(i);
    double v = 0.0;
    for (int m = 0; m < harmonics; ++m) {
      v += a[static_cast<std::size_t>(m)] *
           std::sin(2.0 * std::numbers::pi * f * (m + 1) * t + phase[static_cast<std::size_t>(m)]);
    }
    c.u[i] = offset + amp * v / norm;
  }
  std::ostringstream os;
  os << "fourier f=" << f << " harmonics=" << harmonics << " amplitude=" << amp << " offset=" << offset;
  c.description = os.str();
  return c;
}

using SplineBasis = Eigen::MatrixXd;  // nodes x controls

Eigen::RowVectorXd clamped_knots(int controls, int degree) {
  const int m = controls + degree + 1;
  Eigen::RowVectorXd knots(m);
  const int inner = controls - degree;
  for (int i = 0; i < m; ++i) {
    if (i <= degree) {
      knots[i] = 0.0;
    } else if (i >= controls) {
      knots[i] = 1.0;
    } else {
      knots[i] = static_cast<double>(i - degree) / inner;
    }
  }
  return knots;
}

SplineBasis spline_basis(const Grid1D& g, int controls, int degree) {
  using Spl = Eigen::Spline<double, 1>;
  const Eigen::RowVectorXd knots = clamped_knots(controls, degree);
  SplineBasis B = SplineBasis::Zero(static_cast<Eigen::Index>(g.nodes()), controls);
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    const double t = std::min(g.x(i), 1.0 - 1e-14);
    const auto span = Spl::Span(t, degree, knots);
    const auto basis = Spl::BasisFunctions(t, degree, knots);
    for (int j = 0; j <= degree; ++j) {
      B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(span - degree + j)) = basis[j];
    }
  }
  B.row(static_cast<Eigen::Index>(g.nodes() - 1)).setZero();
  B(static_cast<Eigen::Index>(g.nodes() - 1), controls - 1) = 1.0;
  return B;
}

int spline_degree(int k) { return std::max(3, k + 1); }

// smooth trend (affine plus quadratic at the Greville-like abscissae) plus independent noise
Eigen::VectorXd random_controls(int controls, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double offset = 1.5 * unif(rng);
  const double slope = 6.0 * unif(rng);
  const double curv = 6.0 * unif(rng);
  const double noise = log_uniform(rng, 0.01, 4.0);
  Eigen::VectorXd c(controls);
  for (int j = 0; j < controls; ++j) {
    const double x = static_cast<double>(j) / (controls - 1) - 0.5;
    c[j] = offset + slope * x + curv * x * x + noise * unif(rng);
  }
  return c;
}

Candidate spline_candidate(const Grid1D& g, int k, std::mt19937_64& rng) {
  const int degree = spline_degree(k);
  const int controls = degree + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(16 - degree));
  const Eigen::VectorXd c = random_controls(controls, rng);
  const Eigen::VectorXd u = spline_basis(g, controls, degree) * c;
  Candidate out;
  out.u.assign(u.data(), u.data() + u.size());
  std::ostringstream os;
  os << "spline degree=" << degree << " controls=" << controls;
  out.description = os.str();
  return out;
}

struct UnitRatio {
  int ell;
  int k;
  const Potential& w;
  Grid1D g;

  [[nodiscard]] double operator()(std::span<const double> u) const {
    const double h = g.h();
    const double lhs = trapezoid_sq(g, line_derivative(u, h, ell));
    const double rhs = potential_integral(g, u, w) + trapezoid_sq(g, line_derivative(u, h, k));
    if (!(rhs > 0.0)) return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return lhs / rhs;
  }
};

// dense derivative operator of one order applied to the spline basis
Eigen::MatrixXd derivative_of_basis(const SplineBasis& B, double h, int ell) {
  Eigen::MatrixXd D(B.rows(), B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    const Eigen::VectorXd col = B.col(j);
    const auto d = line_derivative(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), h, ell);
    for (Eigen::Index i = 0; i < B.rows(); ++i) D(i, j) = d[static_cast<std::size_t>(i)];
  }
  return D;
}

struct DescentResult {
  Eigen::VectorXd c;
  double r = 0.0;
};

// ascent on log r over spline controls
DescentResult ascend(const UnitRatio& ratio, const SplineBasis& B, const Eigen::MatrixXd& Dl,
                     const Eigen::MatrixXd& Dk, Eigen::VectorXd c, std::size_t iters) {
  const Grid1D& g = ratio.g;
  Eigen::VectorXd wq(B.rows());
  for (Eigen::Index i = 0; i < B.rows(); ++i) wq[i] = g.weight(static_cast<std::size_t>(i));
  auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const Eigen::VectorXd u = B * x;
    const Eigen::VectorXd dl = Dl * x;
    const Eigen::VectorXd dk = Dk * x;
    const double L = (wq.array() * dl.array().square()).sum();
    double R = (wq.array() * dk.array().square()).sum();
    Eigen::VectorXd ws(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      R += wq[i] * ratio.w.value(u[i]);
      ws[i] = wq[i] * ratio.w.slope(u[i]);
    }
    if (!(L > 0.0) || !(R > 0.0)) return -std::numeric_limits<double>::infinity();
    if (grad) {
      const Eigen::VectorXd gL = 2.0 * Dl.transpose() * (wq.array() * dl.array()).matrix();
      const Eigen::VectorXd gR = B.transpose() * ws + 2.0 * Dk.transpose() * (wq.array() * dk.array()).matrix();
      *grad = gL / L - gR / R;
    }
    return std::log(L) - std::log(R);
  };
  // BFGS on -log r with Armijo backtracking
  const auto n = c.size();
  Eigen::VectorXd grad;
  double f = eval(c, &grad);
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n) * (1.0 / std::max(1.0, grad.norm()));
  for (std::size_t it = 0; it < iters && std::isfinite(f); ++it) {
    if (!(grad.norm() > 1e-10)) break;
    Eigen::VectorXd d = Hinv * grad;
    if (!(d.dot(grad) > 0.0)) {
      Hinv = Eigen::MatrixXd::Identity(n, n) * (1.0 / std::max(1.0, grad.norm()));
      d = Hinv * grad;
    }
    double step = 1.0;
    bool moved = false;
    Eigen::VectorXd trial;
    Eigen::VectorXd gt;
    double ft = f;
    for (int bt = 0; bt < 40; ++bt) {
      trial = c + step * d;
      ft = eval(trial, &gt);
      if (ft > f + 1e-4 * step * d.dot(grad)) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    const Eigen::VectorXd sk = trial - c;
    const Eigen::VectorXd yk = grad - gt;  // gradient of -log r
    c = trial;
    f = ft;
    grad = gt;
    const double sy = sk.dot(yk);
    if (sy > 1e-12 * sk.norm() * yk.norm()) {
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      const double rho = 1.0 / sy;
      Hinv = (I - rho * sk * yk.transpose()) * Hinv * (I - rho * yk * sk.transpose()) + rho * sk * sk.transpose();
    }
  }
  DescentResult out;
  out.c = c;
  out.r = std::isfinite(f) ? std::exp(f) : 0.0;
  return out;
}

}  // namespace

std::string to_string(CandidateFamily f) {
  switch (f) {
    case CandidateFamily::Fourier: return "fourier";
    case CandidateFamily::Spline: return "spline";
    case CandidateFamily::SolverDescent: return "descent";
  }
  return "unknown";
}

CandidateFamily parse_family(const std::string& s) {
  if (s == "fourier") return CandidateFamily::Fourier;
  if (s == "spline") return CandidateFamily::Spline;
  if (s == "descent") return CandidateFamily::SolverDescent;
  throw ArgumentError("unknown candidate family '" + s + "' (expected fourier, spline or descent)");
}

InterpolationReport check_unit_interval(const Field1D& u, int ell, int k, const Potential& w, double q) {
  check_orders(ell, k);
  if (u.u.size() < static_cast<std::size_t>(k + 3)) throw ArgumentError("interpolation: field too short for order k");
  const double len = u.grid.b - u.grid.a;
  const double h = u.grid.h();
  const double lhs = trapezoid_sq(u.grid, line_derivative(u.u, h, ell));
  const double rhs = std::pow(len, -2.0 * ell) * potential_integral(u.grid, u.u, w) +
                     std::pow(len, 2.0 * (k - ell)) * trapezoid_sq(u.grid, line_derivative(u.u, h, k));
  return make_report(ell, k, q, lhs, rhs);
}

InterpolationReport check_scaled(const Field1D& u, double eps, int ell, int k, const Potential& w, double q) {
  check_orders(ell, k);
  const double len = u.grid.b - u.grid.a;
  if (!(eps > 0.0) || !(eps < 0.5 * len)) throw ArgumentError("check_scaled: eps must lie in (0, |I|/2)");
  if (u.u.size() < static_cast<std::size_t>(k + 3)) throw ArgumentError("interpolation: field too short for order k");
  const double h = u.grid.h();
  const double lhs = std::pow(eps, 2.0 * ell) * trapezoid_sq(u.grid, line_derivative(u.u, h, ell));
  const double rhs =
      potential_integral(u.grid, u.u, w) + std::pow(eps, 2.0 * k) * trapezoid_sq(u.grid, line_derivative(u.u, h, k));
  return make_report(ell, k, q, lhs, rhs);
}

ThresholdResult adversarial_threshold(int ell, int k, const Potential& w, CandidateFamily family,
                                      const ThresholdOptions& opts) {
  check_orders(ell, k);
  if (opts.budget < 100) throw ArgumentError("adversarial_threshold: budget must be at least 100");
  if (opts.intervals < 50) throw ArgumentError("adversarial_threshold: need at least 50 intervals");
  const Grid1D g = unit_grid(opts.intervals);
  const UnitRatio ratio{ell, k, w, g};

  ThresholdResult res;
  res.ell = ell;
  res.k = k;
  res.family = family;
  std::vector<double> best_u;

  if (family == CandidateFamily::SolverDescent) {
    const int degree = spline_degree(k);
    const int controls = 12;
    const SplineBasis B = spline_basis(g, controls, degree);
    const Eigen::MatrixXd Dl = derivative_of_basis(B, g.h(), ell);
    const Eigen::MatrixXd Dk = derivative_of_basis(B, g.h(), k);
    const auto draws = parallel_map<std::pair<double, Eigen::VectorXd>>(opts.budget, opts.threads, [&](std::size_t i) {
      auto rng = candidate_rng(opts.seed, i, 3);
      Eigen::VectorXd c = random_controls(controls, rng);
      const Eigen::VectorXd u = B * c;
      return std::make_pair(ratio(std::span<const double>(u.data(), static_cast<std::size_t>(u.size()))), c);
    });
    std::vector<std::size_t> order(draws.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return draws[a].first > draws[b].first; });
    const std::size_t starts = std::min(opts.descent_starts, order.size());
    const auto climbed = parallel_map<DescentResult>(starts, opts.threads, [&](std::size_t i) {
      return ascend(ratio, B, Dl, Dk, draws[order[i]].second, opts.descent_iter);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < climbed.size(); ++i)
      if (climbed[i].r > climbed[best].r) best = i;
    res.r_max = std::max(climbed[best].r, draws[order[0]].first);
    const Eigen::VectorXd u = B * (climbed[best].r >= draws[order[0]].first ? climbed[best].c : draws[order[0]].second);
    best_u.assign(u.data(), u.data() + u.size());
    res.evaluated = opts.budget + starts * opts.descent_iter;
    std::ostringstream os;
    os << "descent degree=" << degree << " controls=" << controls << " start_rank=" << best;
    res.description = os.str();
  } else {
    const auto cands = parallel_map<std::pair<double, std::string>>(opts.budget, opts.threads, [&](std::size_t i) {
      auto rng = candidate_rng(opts.seed, i, family == CandidateFamily::Fourier ? 1 : 2);
      const Candidate c = family == CandidateFamily::Fourier ? fourier_candidate(g, rng) : spline_candidate(g, k, rng);
      return std::make_pair(ratio(c.u), c.description);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < cands.size(); ++i)
      if (cands[i].first > cands[best].first) best = i;
    res.r_max = cands[best].first;
    res.description = cands[best].second;
    auto rng = candidate_rng(opts.seed, best, family == CandidateFamily::Fourier ? 1 : 2);
    best_u = (family == CandidateFamily::Fourier ? fourier_candidate(g, rng) : spline_candidate(g, k, rng)).u;
    res.evaluated = opts.budget;
  }
  if (!(res.r_max > 0.0) || !std::isfinite(res.r_max)) {
    throw NumericError("adversarial_threshold: degenerate ratio sup (" + std::to_string(res.r_max) + ")");
  }
  res.q_hat = 1.0 / res.r_max;
  res.maximizer = Field1D::constant(g, 0.0);
  res.maximizer.u = std::move(best_u);
  return res;
}

ThresholdEstimate estimate_threshold(int ell, int k, const Potential& w, const ThresholdOptions& opts) {
  ThresholdEstimate est;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (auto fam : {CandidateFamily::Fourier, CandidateFamily::Spline, CandidateFamily::SolverDescent}) {
    est.per_family.push_back(adversarial_threshold(ell, k, w, fam, opts));
    lo = std::min(lo, est.per_family.back().q_hat);
    hi = std::max(hi, est.per_family.back().q_hat);
  }
  est.q_hat = lo;
  est.families_agree = hi <= 2.0 * lo;
  return est;
}

std::vector<Field1D> random_test_functions(std::size_t count, int k, std::uint64_t seed, std::size_t intervals) {
  const Grid1D g = unit_grid(intervals);
  std::vector<Field1D> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = candidate_rng(seed, i, 7);
    Field1D f = Field1D::constant(g, 0.0);
    f.u = (i % 2 == 0 ? fourier_candidate(g, rng) : spline_candidate(g, k, rng)).u;
    out.push_back(std::move(f));
  }
  return out;
}

SineProbe sine_probe_scan(int ell, int k, const Potential& w, const std::vector<double>& amplitudes,
                          const std::vector<double>& omegas, std::size_t intervals) {
  check_orders(ell, k);
  if (amplitudes.empty() || omegas.empty()) throw ArgumentError("sine_probe_scan: empty parameter grid");
  const Grid1D g = unit_grid(intervals);
  const UnitRatio ratio{ell, k, w, g};
  SineProbe best;
  std::size_t bi = 0;
  std::size_t bj = 0;
  std::vector<double> u(g.nodes());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    for (std::size_t j = 0; j < omegas.size(); ++j) {
      for (std::size_t n = 0; n < u.size(); ++n) u[n] = amplitudes[i] * std::sin(omegas[j] * g.x(n));
      const double r = ratio(u);
      if (r > best.ratio) {
        best = {amplitudes[i], omegas[j], r, false};
        bi = i;
        bj = j;
      }
    }
  }
  best.interior = bi > 0 && bi + 1 < amplitudes.size() && bj > 0 && bj + 1 < omegas.size();
  return best;
}

double lower_bound_delta(const std::vector<double>& q, const std::vector<double>& q_hat, std::vector<double> alpha) {
  const std::size_t k = q.size();
  if (k == 0) throw ArgumentError("lower_bound_delta: empty coefficient list");
  std::vector<std::size_t> neg;
  for (std::size_t l = 0; l + 1 < k; ++l)
    if (q[l] <= 0.0) neg.push_back(l);
  if (neg.empty()) return std::min(1.0, *std::min_element(q.begin(), q.end()));
  if (alpha.empty()) {
    alpha.assign(k, 0.0);
    for (auto l : neg) alpha[l] = 1.0 / static_cast<double>(neg.size());
  }
  if (alpha.size() != k) throw ArgumentError("lower_bound_delta: alpha needs one entry per order");
  double total = 0.0;
  for (auto l : neg) {
    if (!(alpha[l] > 0.0)) throw ArgumentError("lower_bound_delta: alpha must be positive on negative orders");
    total += alpha[l];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("lower_bound_delta: alpha must sum to 1 over negative orders");
  double delta = 1.0;
  for (std::size_t l = 0; l < k; ++l) {
    if (std::find(neg.begin(), neg.end(), l) != neg.end()) {
      if (l >= q_hat.size() || !(q_hat[l] > 0.0)) {
        throw ArgumentError("lower_bound_delta: missing threshold for order " + std::to_string(l + 1));
      }
      const double a = alpha[l] * q_hat[l];
      if (!(q[l] > -a)) {
        throw ThresholdError("coefficient q_" + std::to_string(l + 1) + " = " + std::to_string(q[l]) +
                             " is not above -alpha*q_hat = " + std::to_string(-a));
      }
      delta = std::min(delta, (q[l] + a) / (1.0 + a));
    } else {
      delta = std::min(delta, q[l]);
    }
  }
  return delta;
}

namespace {
template <class F>
LowerBoundCheck lower_bound_impl(const F& f, const FunctionalSpec& spec, double delta) {
  LowerBoundCheck c;
  c.delta = delta;
  c.energy = assemble_energy(f, spec).total;
  c.comparison = assemble_energy(f, spec.all_positive()).total;
  c.pass = c.energy >= delta * c.comparison - 1e-9;
  return c;
}
}  // namespace

LowerBoundCheck functional_lower_bound_check(const Field1D& f, const FunctionalSpec& spec, double delta) {
  return lower_bound_impl(f, spec, delta);
}

LowerBoundCheck functional_lower_bound_check(const Field2D& f, const FunctionalSpec& spec, double delta) {
  return lower_bound_impl(f, spec, delta);
}

double eps0_proxy(const std::vector<Field1D>& fields, int ell, int k, const Potential& w, double q,
                  const std::vector<double>& eps_grid) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double eps : eps_grid) {
    bool ok = true;
    for (const auto& f : fields) {
      if (!check_scaled(f, eps, ell, k, w, q).pass) {
        ok = false;
        break;
      }
    }
    if (ok && (std::isnan(best) || eps < best)) best = eps;
  }
  return best;
}

}  // namespace phaseflow
