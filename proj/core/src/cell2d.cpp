#include "phaseflow/cell2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "phaseflow/errors.hpp"
#include "phaseflow/parallel.hpp"

namespace phaseflow {

BoundaryProfile BoundaryProfile::build(int k) {
  if (k < 1 || k > 4) throw ArgumentError("boundary profile: k must be in 1..4");
  BoundaryProfile p;
  p.k_ = k;
  p.coef_.assign(static_cast<std::size_t>(2 * k), 0.0);
  // c * int_0^(8t) (1 - s^2)^(k-1) ds, expanded binomially
  double binom = 1.0;
  double at_one = 0.0;
  std::vector<double> raw(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    if (j > 0) binom = binom * (k - j) / j;
    raw[static_cast<std::size_t>(j)] = binom * (j % 2 ? -1.0 : 1.0) / (2.0 * j + 1.0);
    at_one += raw[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < k; ++j) {
    p.coef_[static_cast<std::size_t>(2 * j + 1)] =
        raw[static_cast<std::size_t>(j)] / at_one * std::pow(8.0, 2.0 * j + 1.0);
  }

  if (std::abs(p.value(0.125) - 1.0) > 1e-12 || std::abs(p.value(-0.125) + 1.0) > 1e-12) {
    throw NumericError("boundary profile: end values are not +-1");
  }
  for (int ord = 1; ord < k; ++ord) {
    if (std::abs(p.derivative(0.125 - 1e-15, ord)) > 1e-6 * std::pow(8.0, ord)) {
      throw NumericError("boundary profile: derivative " + std::to_string(ord) + " does not vanish at 1/8");
    }
  }
  for (int i = 0; i <= 200; ++i) {
    const double t = -0.125 + 0.25 * i / 200.0;
    if (std::abs(p.value(t)) > 1.0 + 1e-12) throw NumericError("boundary profile: |u| exceeds 1");
  }
  return p;
}

double BoundaryProfile::derivative(double t, int order) const {
  if (order < 0) throw ArgumentError("boundary profile: negative derivative order");
  if (t <= -0.125 || t >= 0.125) {
    if (order > 0) return 0.0;
    return t < 0 ? -1.0 : 1.0;
  }
  double acc = 0.0;
  for (std::size_t j = coef_.size(); j-- > static_cast<std::size_t>(order);) {
    double c = coef_[j];
    for (int m = 0; m < order; ++m) c *= static_cast<double>(j) - m;
    acc = acc * t + c;
  }
  return acc;
}

BoundaryProfile build_boundary_profile(int k) { return BoundaryProfile::build(k); }

std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::NotConverged: return "not_converged";
    case CellStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

std::size_t CellProblem::resolved_cells() const {
  if (cells > 0) return cells;
  return static_cast<std::size_t>(std::ceil(6.0 / eps - 1e-9));
}

Grid2D CellProblem::grid() const {
  return Grid2D::rotated(angle, resolved_cells(), 1.0, lateral == LateralMode::Periodic, flip_tangent);
}

double CellProblem::band() const {
  const double h = 1.0 / static_cast<double>(resolved_cells());
  return std::max(r_band, 2.0 * spec.k * h);
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void validate(const CellProblem& p) {
  p.spec.validate();
  if (!(p.eps > 0.0 && p.eps < 1.0)) throw ArgumentError("cell: eps must lie in (0, 1)");
  if (!(p.r_band > 0.0 && p.r_band < 0.5)) throw ArgumentError("cell: r_band must lie in (0, 1/2)");
  const double h = 1.0 / static_cast<double>(p.resolved_cells());
  if (h > p.eps / 6.0 * (1.0 + 1e-9)) {
    throw ArgumentError("cell: grid does not resolve eps (h = " + fmt(h) + " > eps/6 = " + fmt(p.eps / 6.0) + ")");
  }
  if (p.band() >= 0.5 - 2.0 * h) throw ArgumentError("cell: boundary band covers the cell");
}

// bilinear sample in frame coordinates; t beyond the grid takes the nearest row
double sample(const Field2D& f, double s, double t) {
  const Grid2D& g = f.grid;
  const double h = g.h();
  const auto ns = g.ns();
  const auto nt = g.nt();
  double pt = std::clamp((t + 0.5 * g.side) / h, 0.0, static_cast<double>(nt - 1));
  auto j = std::min(static_cast<std::size_t>(pt), nt - 2);
  const double wt = pt - static_cast<double>(j);
  double ps = (s + 0.5 * g.side) / h;
  std::size_t i0;
  std::size_t i1;
  double ws;
  if (g.periodic_tangent) {
    ps = std::fmod(ps, static_cast<double>(ns));
    if (ps < 0) ps += static_cast<double>(ns);
    i0 = std::min(static_cast<std::size_t>(ps), ns - 1);
    ws = ps - static_cast<double>(i0);
    i1 = (i0 + 1) % ns;
  } else {
    ps = std::clamp(ps, 0.0, static_cast<double>(ns - 1));
    i0 = std::min(static_cast<std::size_t>(ps), ns - 2);
    ws = ps - static_cast<double>(i0);
    i1 = i0 + 1;
  }
  const auto at = [&](std::size_t i, std::size_t jj) { return f.u[g.index(i, jj)]; };
  return (1 - wt) * ((1 - ws) * at(i0, j) + ws * at(i1, j)) + wt * ((1 - ws) * at(i0, j + 1) + ws * at(i1, j + 1));
}

Field2D perturbed(const Field2D& base, std::uint64_t seed, double band) {
  Field2D f = base;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double a[2][3];
  for (auto& row : a)
    for (double& x : row) x = unif(rng);
  const Grid2D& g = f.grid;
  const double lo = -0.5 + band;
  const double len = 1.0 - 2.0 * band;
  for (std::size_t j = 0; j < g.nt(); ++j) {
    const double tau = (g.t(j) - lo) / len;
    if (tau <= 0.0 || tau >= 1.0) continue;
    for (std::size_t i = 0; i < g.ns(); ++i) {
      const std::size_t n = g.index(i, j);
      if (f.mask[n] == NodeState::Fixed) continue;
      const double s = g.s(i) + 0.5;
      double d = 0.0;
      for (int m = 1; m <= 2; ++m) {
        for (int q = 0; q < 3; ++q) {
          const double lat = g.periodic_tangent ? std::cos(2.0 * std::numbers::pi * q * s)
                                                : std::cos(std::numbers::pi * q * s);
          d += a[m - 1][q] * std::sin(m * std::numbers::pi * tau) * lat;
        }
      }
      f.u[n] = std::clamp(f.u[n] + 0.2 * d, -1.5, 1.5);
    }
  }
  return f;
}

std::size_t sign_changes_along_normal(const Field2D& f) {
  const Grid2D& g = f.grid;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < g.ns(); ++i) {
    std::size_t changes = 0;
    int last = 0;
    for (std::size_t j = 0; j + 1 < g.nt(); ++j) {
      const double d = f.u[g.index(i, j + 1)] - f.u[g.index(i, j)];
      if (std::abs(d) <= 1e-6 * g.h()) continue;
      const int s = d > 0 ? 1 : -1;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    worst = std::max(worst, changes);
  }
  return worst;
}

}  // namespace

Field2D boundary_field(const CellProblem& p) {
  const Grid2D g = p.grid();
  Field2D f = Field2D::constant(g, 0.0);
  const auto ramp = BoundaryProfile::build(p.spec.k);
  const double band = p.band();
  for (std::size_t j = 0; j < g.nt(); ++j) {
    for (std::size_t i = 0; i < g.ns(); ++i) {
      const std::size_t n = g.index(i, j);
      f.u[n] = ramp.value(g.t(j) / p.eps);
      const bool normal_band = std::abs(g.t(j)) >= 0.5 - band - 1e-12;
      const bool lateral_band = p.lateral == LateralMode::Clamped && std::abs(g.s(i)) >= 0.5 - band - 1e-12;
      if (normal_band || lateral_band) f.mask[n] = NodeState::Fixed;
    }
  }
  return f;
}

CellResult solve_cell(const CellProblem& p, const CellOptions& opts, const std::optional<Field2D>& init) {
  validate(p);
  const Field2D base = boundary_field(p);
  const FunctionalSpec spec = p.spec.with_eps(p.eps);
  const DiscreteFunctional df(base.grid, spec);

  std::vector<Field2D> inits;
  if (init) {
    if (init->u.size() != base.u.size()) throw ArgumentError("cell: initial field does not match the grid");
    Field2D f = base;
    assign_free(f.u, init->u, base.mask);
    inits.push_back(std::move(f));
  }
  inits.push_back(base);
  for (int m = 0; m < opts.perturbed_starts; ++m) {
    inits.push_back(perturbed(base, opts.seed + static_cast<std::uint64_t>(m), p.band()));
  }

  const std::size_t exact = init ? 2 : 1;
  MinimizeOptions explore = opts.minimizer;
  explore.max_iter = std::min(explore.max_iter, opts.explore_iter);
  auto runs = parallel_map<MinimizeResult>(inits.size(), opts.threads, [&](std::size_t i) {
    return minimize(df, inits[i].u, base.mask, i < exact ? opts.minimizer : explore);
  });

  CellResult res;
  res.angle = p.angle;
  res.eps = p.eps;
  res.init_energy = df.value(base.u);
  std::size_t best = 0;
  bool unbounded = false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].status == MinimizeStatus::Unbounded) unbounded = true;
    if (runs[i].energy < runs[best].energy) best = i;
    if (runs[i].converged(opts.minimizer)) {
      lo = std::min(lo, runs[i].energy);
      hi = std::max(hi, runs[i].energy);
    }
  }
  if (best >= exact && runs[best].status == MinimizeStatus::MaxIterations) {
    runs[best] = minimize(df, runs[best].u, base.mask, opts.minimizer);
    if (runs[best].converged(opts.minimizer)) {
      lo = std::min(lo, runs[best].energy);
      hi = std::max(hi, runs[best].energy);
    }
  }
  const MinimizeResult& r = runs[best];
  res.solution = base;
  res.solution.u = r.u;
  res.report = df.energy(r.u);
  res.energy = res.report.total;
  res.iterations = r.iterations;
  res.grad_norm = r.grad_inf;
  res.spread = hi >= lo ? hi - lo : 0.0;
  res.report.converged = r.converged(opts.minimizer);
  res.report.iterations = r.iterations;
  res.report.grad_norm = r.grad_inf;
  res.report.history = r.history;
  res.status = res.report.converged ? CellStatus::Ok : CellStatus::NotConverged;

  const std::size_t osc = sign_changes_along_normal(res.solution);
  if (unbounded || res.energy < opts.minimizer.unbounded_below) {
    res.status = CellStatus::Unbounded;
    res.diagnostic = "energy diverged below the unbounded threshold";
  } else if (res.energy < -1e-9) {
    res.status = CellStatus::Unbounded;
    res.diagnostic = "negative cell energy: coefficients below the admissible threshold";
  } else if (osc > base.grid.nt() / 4) {
    res.status = CellStatus::Unbounded;
    res.diagnostic = "grid-scale oscillation along the normal (" + std::to_string(osc) + " sign changes)";
  } else if (res.status != CellStatus::Ok) {
    res.diagnostic = "minimizer stopped with status " + to_string(r.status);
  }
  return res;
}

GEstimate estimate_g(double angle, const FunctionalSpec& spec, const std::vector<double>& eps_schedule, double tol,
                     const CellOptions& opts, const CellProblem& base) {
  if (eps_schedule.empty()) throw ArgumentError("estimate_g: empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0 && eps_schedule[i] < 1.0)) throw ArgumentError("estimate_g: eps must lie in (0, 1)");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1])) {
      throw ArgumentError("estimate_g: eps schedule must be strictly decreasing");
    }
  }
  GEstimate est;
  est.angle = angle;
  std::optional<CellResult> prev;
  for (double eps : eps_schedule) {
    CellProblem p = base;
    p.angle = angle;
    p.eps = eps;
    p.spec = spec;
    if (base.cells > 0 && 1.0 / static_cast<double>(base.cells) > eps / 6.0 * (1.0 + 1e-9)) p.cells = 0;
    if (p.resolved_cells() > opts.max_cells) {
      throw ResolutionError("scale floor: eps = " + fmt(eps) + " needs " + std::to_string(p.resolved_cells()) +
                            " cells per axis, budget is " + std::to_string(opts.max_cells));
    }
    std::optional<Field2D> init;
    if (prev) {
      Field2D f = boundary_field(p);
      const double stretch = prev->eps / eps;
      for (std::size_t j = 0; j < f.grid.nt(); ++j) {
        for (std::size_t i = 0; i < f.grid.ns(); ++i) {
          const std::size_t n = f.grid.index(i, j);
          if (f.mask[n] == NodeState::Fixed) continue;
          f.u[n] = sample(prev->solution, f.grid.s(i), f.grid.t(j) * stretch);
        }
      }
      init = std::move(f);
    }
    CellOptions o = opts;
    if (prev) o.perturbed_starts = 0;
    CellResult r = solve_cell(p, o, init);
    if (r.status == CellStatus::Unbounded) {
      est.unbounded = true;
      est.diagnostic = "unbounded at eps = " + fmt(eps) + ": " + r.diagnostic;
      est.last = std::move(r);
      return est;
    }
    est.table.emplace_back(eps, r.energy);
    prev = std::move(r);
  }
  est.last = *prev;
  est.g_hat = est.table.back().second;
  const auto n = est.table.size();
  est.converged = prev->status == CellStatus::Ok &&
                  (n < 2 || std::abs(est.table[n - 1].second - est.table[n - 2].second) < tol);
  if (prev->status != CellStatus::Ok) {
    est.diagnostic = prev->diagnostic;
  } else if (!est.converged) {
    est.diagnostic = "successive eps values differ by more than tol";
  }
  return est;
}

std::vector<GEstimate> anisotropy_scan(const FunctionalSpec& spec, const std::vector<double>& angles,
                                       const std::vector<double>& eps_schedule, double tol, const CellOptions& opts,
                                       const CellProblem& base) {
  CellOptions inner = opts;
  const unsigned outer = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(angles.size())));
  inner.threads = std::max(1u, opts.threads / outer);
  return parallel_map<GEstimate>(angles.size(), outer, [&](std::size_t i) {
    return estimate_g(angles[i], spec, eps_schedule, tol, inner, base);
  });
}

BasisCheck basis_independence_check(double angle, const FunctionalSpec& spec, double eps, const CellOptions& opts,
                                    std::size_t cells_plus, std::size_t cells_minus) {
  CellProblem p;
  p.angle = angle;
  p.eps = eps;
  p.spec = spec;
  p.cells = cells_plus;
  CellProblem m = p;
  m.flip_tangent = true;
  m.cells = cells_minus;
  BasisCheck out;
  out.g_plus = solve_cell(p, opts).energy;
  out.g_minus = solve_cell(m, opts).energy;
  out.spread = std::abs(out.g_plus - out.g_minus);
  out.pass = out.spread < 1e-3 * std::max({out.g_plus, out.g_minus, 1.0});
  if (p.resolved_cells() != m.resolved_cells()) {
    out.warning = "grids differ (" + std::to_string(p.resolved_cells()) + " vs " +
                  std::to_string(m.resolved_cells()) + " cells): spread is discretization-dominated";
  }
  return out;
}

PositivityReport positivity_check(const std::vector<GEstimate>& scan, double tol) {
  if (scan.empty()) throw ArgumentError("positivity_check: empty scan");
  PositivityReport rep;
  rep.min_g = std::numeric_limits<double>::infinity();
  for (const auto& e : scan) {
    if (e.unbounded) {
      rep.offending_angles.push_back(e.angle);
      continue;
    }
    rep.min_g = std::min(rep.min_g, e.g_hat);
    if (!(e.g_hat > 10.0 * tol)) rep.offending_angles.push_back(e.angle);
  }
  rep.pass = rep.offending_angles.empty();
  return rep;
}

double potential_concentration(const CellResult& r, const FunctionalSpec& spec, double width) {
  const Grid2D& g = r.solution.grid;
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < g.nt(); ++j) {
    for (std::size_t i = 0; i < g.ns(); ++i) {
      const double e = spec.potential.value(r.solution.u[g.index(i, j)]) * g.weight(i, j);
      total += e;
      if (std::abs(g.t(j)) <= width) inside += e;
    }
  }
  return total > 0.0 ? inside / total : 1.0;
}

double lateral_variation(const Field2D& f, double width) {
  const Grid2D& g = f.grid;
  double worst = 0.0;
  for (std::size_t j = 0; j < g.nt(); ++j) {
    if (std::abs(g.t(j)) > width) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < g.ns(); ++i) {
      lo = std::min(lo, f.u[g.index(i, j)]);
      hi = std::max(hi, f.u[g.index(i, j)]);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

std::vector<std::pair<double, double>> polar_table(const std::vector<GEstimate>& scan) {
  std::vector<std::pair<double, double>> out;
  out.reserve(scan.size());
  for (const auto& e : scan) out.emplace_back(e.angle, e.g_hat);
  return out;
}

}  // namespace phaseflow
