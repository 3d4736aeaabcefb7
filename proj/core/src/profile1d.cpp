#include "phaseflow/profile1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <sstream>

#include "phaseflow/boundary_profile.hpp"
#include "phaseflow/errors.hpp"
#include "phaseflow/parallel.hpp"

namespace phaseflow {

Grid1D ProfileProblem::grid() const {
  const auto cells = static_cast<std::size_t>(std::llround(2.0 * T / h));
  return Grid1D{-T, T, cells - 1};
}

double ProfileProblem::band() const { return std::max(bc_band, (2.0 * spec.k + 1.0) * h); }

void ProfileProblem::validate() const {
  spec.validate();
  if (!(T > 0.5)) throw ArgumentError("profile: T must exceed 1/2");
  if (!(h > 0.0) || h > 0.1 * T) throw ArgumentError("profile: spacing h must be positive and small against T");
  if (spec.eps != 1.0) throw ArgumentError("profile: the rescaled problem requires eps = 1");
  if (band() >= T - h) throw ArgumentError("profile: boundary bands cover the whole interval");
}

std::string to_string(ProfileStatus s) {
  switch (s) {
    case ProfileStatus::Ok: return "ok";
    case ProfileStatus::NotConverged: return "not_converged";
    case ProfileStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

std::string format_T(double T) {
  std::ostringstream os;
  os << T;
  return os.str();
}

Field1D banded(const ProfileProblem& p) {
  const Grid1D g = p.grid();
  Field1D f = Field1D::constant(g, 0.0);
  const double band = p.band();
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    const double x = g.x(i);
    if (x <= g.a + band + 1e-12) {
      f.u[i] = p.left_value;
      f.mask[i] = NodeState::Fixed;
    } else if (x >= g.b - band - 1e-12) {
      f.u[i] = p.right_value;
      f.mask[i] = NodeState::Fixed;
    }
  }
  return f;
}

Field1D perturbed(const ProfileProblem& p, std::uint64_t seed) {
  Field1D f = ramp_init(p, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double band = p.band();
  const double lo = -p.T + band;
  const double len = 2.0 * (p.T - band);
  double a[3];
  for (double& x : a) x = unif(rng);
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    if (f.mask[i] == NodeState::Fixed) continue;
    const double s = (f.grid.x(i) - lo) / len;
    double d = 0.0;
    for (int m = 1; m <= 3; ++m) d += a[m - 1] * std::sin(m * std::numbers::pi * s);
    f.u[i] += 0.25 * d;
  }
  return f;
}

}  // namespace

Field1D ramp_init(const ProfileProblem& p, double width) {
  Field1D f = banded(p);
  const auto ramp = BoundaryProfile::build(p.spec.k);
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    if (f.mask[i] == NodeState::Fixed) continue;
    if (p.left_value == p.right_value) {
      f.u[i] = p.left_value;
      continue;
    }
    // ramp on [-1/8, 1/8] stretched to [-width/2, width/2], mapped onto the band values
    const double r = ramp.value(f.grid.x(i) / (4.0 * width));
    f.u[i] = 0.5 * (p.left_value + p.right_value) + 0.5 * (p.right_value - p.left_value) * r;
  }
  return f;
}

std::size_t derivative_sign_changes(const Field1D& f, double floor) {
  std::size_t changes = 0;
  int last = 0;
  const double h = f.grid.h();
  for (std::size_t i = 0; i + 1 < f.u.size(); ++i) {
    const double d = (f.u[i + 1] - f.u[i]) / h;
    if (std::abs(d) <= floor) continue;
    const int s = d > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

double sample_field(const Field1D& f, double t) {
  const Grid1D& g = f.grid;
  if (t <= g.a) return f.u.front();
  if (t >= g.b) return f.u.back();
  const double pos = (t - g.a) / g.h();
  const auto i = std::min(static_cast<std::size_t>(pos), f.u.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * f.u[i] + w * f.u[i + 1];
}

ProfileSolution solve_profile(const ProfileProblem& p, const std::optional<Field1D>& init,
                              const ProfileOptions& opts) {
  p.validate();
  const Field1D base = banded(p);
  std::vector<Field1D> inits;
  if (init) {
    if (init->u.size() != base.u.size()) throw ArgumentError("profile: initial field does not match the grid");
    Field1D f = base;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
      if (base.mask[i] == NodeState::Fixed) {
        if (std::abs(init->u[i] - base.u[i]) > 1e-12) {
          throw ArgumentError("profile: initial field does not respect the Fixed bands");
        }
      } else {
        f.u[i] = init->u[i];
      }
    }
    inits.push_back(std::move(f));
  }
  if (!init || opts.multistart) {
    inits.push_back(ramp_init(p, 1.0));
    if (opts.multistart) {
      inits.push_back(ramp_init(p, 0.5));
      inits.push_back(ramp_init(p, 2.0));
      inits.push_back(perturbed(p, opts.seed));
      inits.push_back(perturbed(p, opts.seed + 1));
    }
  }

  const DiscreteFunctional df(base.grid, p.spec);
  auto runs = parallel_map<MinimizeResult>(inits.size(), opts.threads, [&](std::size_t i) {
    return minimize(df, inits[i].u, base.mask, opts.minimizer);
  });

  ProfileSolution sol;
  sol.starts = runs.size();
  std::size_t best = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool unbounded = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].status == MinimizeStatus::Unbounded) unbounded = true;
    if (runs[i].energy < runs[best].energy) best = i;
    if (runs[i].converged(opts.minimizer)) {
      lo = std::min(lo, runs[i].energy);
      hi = std::max(hi, runs[i].energy);
    }
  }
  const MinimizeResult& r = runs[best];
  sol.field = base;
  sol.field.u = r.u;
  sol.report = df.energy(r.u);
  sol.energy = sol.report.total;
  sol.converged = r.converged(opts.minimizer);
  sol.iterations = r.iterations;
  sol.grad_norm = r.grad_inf;
  sol.report.converged = sol.converged;
  sol.report.iterations = r.iterations;
  sol.report.grad_norm = r.grad_inf;
  sol.report.history = r.history;
  sol.multistart_spread = hi >= lo ? hi - lo : 0.0;
  sol.status = sol.converged ? ProfileStatus::Ok : ProfileStatus::NotConverged;

  const std::size_t osc = derivative_sign_changes(sol.field);
  if (unbounded || sol.energy < opts.minimizer.unbounded_below) {
    sol.status = ProfileStatus::Unbounded;
    sol.diagnostic = "energy diverged below the unbounded threshold";
  } else if (sol.energy < -1e-9) {
    sol.status = ProfileStatus::Unbounded;
    sol.diagnostic = "negative transition energy: repeating the transition drives the energy to -infinity";
  } else if (osc > base.grid.n / 4) {
    sol.status = ProfileStatus::Unbounded;
    sol.diagnostic = "grid-scale oscillation of u' (" + std::to_string(osc) + " sign changes)";
  } else if (!sol.converged) {
    sol.diagnostic = "minimizer stopped with status " + to_string(r.status);
  }
  return sol;
}

double default_profile_h(int k) {
  if (k <= 2) return 0.01;
  if (k == 3) return 0.02;
  return 0.04;
}

MEstimate estimate_m(const FunctionalSpec& spec, const std::vector<double>& T_schedule, double tol,
                     const ProfileOptions& opts, double h) {
  if (T_schedule.size() < 3) throw ArgumentError("estimate_m: schedule needs at least 3 entries");
  for (std::size_t i = 0; i < T_schedule.size(); ++i) {
    if (!(T_schedule[i] > 0.5)) throw ArgumentError("estimate_m: every T must exceed 1/2");
    if (i > 0 && !(T_schedule[i] > T_schedule[i - 1])) {
      throw ArgumentError("estimate_m: schedule must be strictly increasing");
    }
  }
  MEstimate est;
  std::optional<ProfileSolution> prev;
  for (double T : T_schedule) {
    ProfileProblem p;
    p.spec = spec;
    p.T = T;
    p.h = h;
    std::optional<Field1D> init;
    if (prev) {
      Field1D ext = ramp_init(p, 1.0);
      for (std::size_t i = 0; i < ext.u.size(); ++i) {
        const double x = ext.grid.x(i);
        if (ext.mask[i] == NodeState::Fixed) continue;
        if (x < prev->field.grid.a) {
          ext.u[i] = p.left_value;
        } else if (x > prev->field.grid.b) {
          ext.u[i] = p.right_value;
        } else {
          ext.u[i] = sample_field(prev->field, x);
        }
      }
      init = std::move(ext);
    }
    ProfileSolution sol = solve_profile(p, init, opts);
    if (sol.status == ProfileStatus::Unbounded) {
      est.unbounded = true;
      est.diagnostic = "unbounded at T = " + format_T(T) + ": " + sol.diagnostic;
      est.solutions.push_back(std::move(sol));
      break;
    }
    est.table.emplace_back(T, sol.energy);
    prev = sol;
    est.solutions.push_back(std::move(sol));
  }
  if (!est.table.empty()) est.m_hat = est.table.back().second;
  for (std::size_t i = 1; i < est.table.size(); ++i) {
    if (est.table[i].second > est.table[i - 1].second + 1e-6) {
      est.monotone = false;
      est.diagnostic = "m(T) increased between T = " + format_T(est.table[i - 1].first) + " and T = " +
                       format_T(est.table[i].first) + " (under-resolved)";
    }
  }
  if (est.table.size() >= 2 && !est.unbounded) {
    const auto n = est.table.size();
    est.converged = std::abs(est.table[n - 1].second - est.table[n - 2].second) < tol;
  }
  return est;
}

MEstimate estimate_m_k(int k, const Potential& w, const std::vector<double>& T_schedule, double tol,
                       const ProfileOptions& opts, double h) {
  FunctionalSpec spec = FunctionalSpec::pure(k, 1.0);
  spec.potential = w;
  return estimate_m(spec, T_schedule, tol, opts, h);
}

TailReport tail_diagnostics(const ProfileSolution& sol, int k, double threshold) {
  TailReport rep;
  rep.threshold = threshold;
  const double T = 0.5 * (sol.field.grid.b - sol.field.grid.a);
  const double mid = 0.5 * (sol.field.grid.b + sol.field.grid.a);
  for (int ell = 1; ell <= std::max(1, k - 1); ++ell) {
    const Field1D d = derivative_1d(sol.field, ell);
    double mx = 0.0;
    for (std::size_t i = 0; i < d.u.size(); ++i) {
      if (std::abs(d.grid.x(i) - mid) >= 0.9 * T) mx = std::max(mx, std::abs(d.u[i]));
    }
    rep.max_abs.push_back(mx);
    if (!(mx < threshold)) rep.pass = false;
  }
  return rep;
}

}  // namespace phaseflow
