#include "phaseflow/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "phaseflow/errors.hpp"

namespace phaseflow {

double Segment::length() const { return std::hypot(b[0] - a[0], b[1] - a[1]); }

double Segment::normal_angle() const {
  const double th = std::atan2(b[0] - a[0], -(b[1] - a[1]));
  return th < 0 ? th + 2.0 * std::numbers::pi : th;
}

InterfaceSpec InterfaceSpec::jumps_1d(std::vector<double> at) {
  InterfaceSpec s;
  s.dim = 1;
  s.jumps = std::move(at);
  return s;
}

InterfaceSpec InterfaceSpec::flat(double angle, double length) {
  InterfaceSpec s;
  s.dim = 2;
  const double tx = std::sin(angle);
  const double ty = -std::cos(angle);
  s.segments.push_back(Segment{{-0.5 * length * tx, -0.5 * length * ty}, {0.5 * length * tx, 0.5 * length * ty}});
  return s;
}

void InterfaceSpec::validate() const {
  if (dim == 1) {
    if (!segments.empty()) throw ArgumentError("interface: 1D spec cannot carry segments");
    for (double x : jumps)
      if (!std::isfinite(x)) throw ArgumentError("interface: non-finite jump location");
  } else if (dim == 2) {
    if (segments.empty()) throw ArgumentError("interface: 2D spec needs at least one segment");
    for (const auto& s : segments) {
      if (!(s.length() > 0.0) || !std::isfinite(s.length())) throw ArgumentError("interface: degenerate segment");
    }
  } else {
    throw ArgumentError("interface: dimension must be 1 or 2");
  }
}

double GTable::lookup(double angle) const {
  if (rows.empty()) throw ArgumentError("g table is empty");
  const double period = even ? std::numbers::pi : 2.0 * std::numbers::pi;
  double best = std::numeric_limits<double>::infinity();
  double g = 0.0;
  for (const auto& [a, v] : rows) {
    double d = std::fmod(std::abs(angle - a), period);
    d = std::min(d, period - d);
    if (d < best) {
      best = d;
      g = v;
    }
  }
  if (best > std::numbers::pi / 32.0 + 1e-12) {
    std::ostringstream os;
    os << "g table does not cover angle " << angle << " (nearest entry " << best << " rad away)";
    throw ArgumentError(os.str());
  }
  return g;
}

GTable GTable::constant(double g) {
  GTable t;
  for (int i = 0; i < 32; ++i) t.rows.emplace_back(i * std::numbers::pi / 32.0, g);
  return t;
}

GTable GTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open g table " + path);
  std::string line;
  int cols = 0;
  std::vector<std::array<double, 3>> raw;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (cols == 0) {
      if (line == "angle,g_final") {
        cols = 2;
      } else if (line == "angle,epsilon,g") {
        cols = 3;
      } else {
        throw ArgumentError(path + ": expected header 'angle,g_final' or 'angle,epsilon,g'");
      }
      continue;
    }
    std::array<double, 3> row{0.0, 0.0, 0.0};
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= cols) throw ArgumentError(path + ": too many columns in '" + line + "'");
      try {
        row[static_cast<std::size_t>(c)] = std::stod(cell);
      } catch (const std::exception&) {
        throw ArgumentError(path + ": malformed number '" + cell + "'");
      }
      ++c;
    }
    if (c != cols) throw ArgumentError(path + ": too few columns in '" + line + "'");
    raw.push_back(row);
  }
  if (cols == 0) throw ArgumentError(path + ": missing header");
  GTable t;
  if (cols == 2) {
    for (const auto& r : raw) t.rows.emplace_back(r[0], r[1]);
    return t;
  }
  // keep the smallest eps per angle
  std::sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) {
    return x[0] < y[0] || (x[0] == y[0] && x[1] < y[1]);
  });
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i == 0 || raw[i][0] != raw[i - 1][0]) t.rows.emplace_back(raw[i][0], raw[i][2]);
  }
  return t;
}

double predicted_limit(const InterfaceSpec& iface, double m_hat) {
  iface.validate();
  if (iface.dim != 1) throw ArgumentError("predicted_limit: 2D interfaces need a g table");
  return m_hat * static_cast<double>(iface.jumps.size());
}

double predicted_limit(const InterfaceSpec& iface, const GTable& g) {
  iface.validate();
  if (iface.dim != 2) throw ArgumentError("predicted_limit: 1D interfaces take m_hat");
  double total = 0.0;
  for (const auto& s : iface.segments) total += s.length() * g.lookup(s.normal_angle());
  return total;
}

std::size_t count_transitions(const std::vector<double>& u) {
  std::size_t n = 0;
  int state = 0;
  for (double v : u) {
    const int s = v <= -0.5 ? -1 : (v >= 0.5 ? 1 : 0);
    if (s == 0) continue;
    if (state != 0 && s != state) ++n;
    state = s;
  }
  return n;
}

double l2_to_step(const Field1D& f, double at, double left, double right) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    const double x = f.grid.x(i);
    const double target = x < at ? left : (x > at ? right : 0.5 * (left + right));
    s += f.grid.weight(i) * (f.u[i] - target) * (f.u[i] - target);
  }
  return std::sqrt(s);
}

double l2_to_sign(const Field1D& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    const double p = f.u[i] >= 0.0 ? 1.0 : -1.0;
    s += f.grid.weight(i) * (f.u[i] - p) * (f.u[i] - p);
  }
  return std::sqrt(s);
}

namespace {

void check_schedule(const std::vector<double>& eps) {
  if (eps.empty()) throw ArgumentError("gamma: empty eps schedule");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ArgumentError("gamma: eps must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ArgumentError("gamma: eps schedule must be strictly decreasing");
  }
}

void finish(GammaReport& rep) {
  if (rep.rows.empty()) return;
  const double f0 = rep.predicted;
  const auto& last = rep.rows.back();
  const double slack = f0 > 0.0 ? f0 : 1.0;
  rep.liminf_ok = f0 > 0.0 ? last.energy >= 0.95 * f0 : last.energy >= -1e-9;
  rep.limsup_ok = f0 > 0.0 ? last.recovery_energy <= 1.05 * f0 : last.recovery_energy <= 0.05;
  rep.trend_ok = true;
  rep.ordered = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    if (!(r.energy <= r.recovery_energy + 1e-9 * (1.0 + std::abs(r.recovery_energy))) &&
        std::isfinite(r.recovery_energy)) {
      rep.ordered = false;
    }
    if (i > 0 && std::abs(r.energy - f0) > std::abs(rep.rows[i - 1].energy - f0) + 0.01 * slack) rep.trend_ok = false;
  }
}

}  // namespace

GammaReport run_gamma_1d(const FunctionalSpec& spec, const std::vector<double>& eps_schedule, double predicted,
                         const Gamma1DOptions& opts) {
  spec.validate();
  check_schedule(eps_schedule);
  if (!(opts.b > opts.a)) throw ArgumentError("gamma: empty domain");
  const Grid1D grid{opts.a, opts.b, opts.n};
  const double mid = 0.5 * (opts.a + opts.b);
  Field1D base = Field1D::constant(grid, 0.0);
  const std::size_t band = static_cast<std::size_t>(spec.k) + 1;
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    if (i < band) {
      base.u[i] = opts.left;
      base.mask[i] = NodeState::Fixed;
    } else if (i + band >= grid.nodes()) {
      base.u[i] = opts.right;
      base.mask[i] = NodeState::Fixed;
    }
  }
  const auto ramp = BoundaryProfile::build(spec.k);

  GammaReport rep;
  rep.predicted = predicted;
  std::optional<std::pair<double, Field1D>> prev;
  for (double eps : eps_schedule) {
    const DiscreteFunctional df(grid, spec.with_eps(eps));
    Field1D init = base;
    Field1D rec = base;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      if (base.mask[i] == NodeState::Fixed) continue;
      const double y = grid.x(i) - mid;
      double r = opts.left;
      if (opts.profile && opts.left != opts.right) {
        r = sample_field(*opts.profile, y / eps);
      } else if (opts.left != opts.right) {
        r = 0.5 * (opts.left + opts.right) + 0.5 * (opts.right - opts.left) * ramp.value(y / (4.0 * eps));
      }
      rec.u[i] = r;
      init.u[i] = prev ? sample_field(prev->second, mid + y * prev->first / eps) : r;
    }
    const double rec_energy = df.value(rec.u);
    MinimizeResult res = minimize(df, init.u, base.mask, opts.minimizer);
    // the recovery field is admissible too; keep it when the warm start lands higher
    if (prev && rec_energy < res.energy) {
      MinimizeResult alt = minimize(df, rec.u, base.mask, opts.minimizer);
      if (alt.energy < res.energy) res = std::move(alt);
    }
    Field1D sol = base;
    sol.u = res.u;
    GammaRow row;
    row.eps = eps;
    row.energy = res.energy;
    row.recovery_energy = rec_energy;
    row.l2dist = opts.left == opts.right ? l2_to_step(sol, mid, opts.left, opts.left)
                                         : l2_to_step(sol, mid, opts.left, opts.right);
    row.transitions = count_transitions(sol.u);
    row.converged = res.converged(opts.minimizer);
    rep.rows.push_back(row);
    if (res.status == MinimizeStatus::Unbounded || res.energy < -1e-9) {
      rep.unbounded = true;
      std::ostringstream os;
      os << "unbounded at eps = " << eps << " (energy " << res.energy << ")";
      rep.diagnostic = os.str();
      if (opts.keep_fields) rep.fields_1d.push_back(sol);
      break;
    }
    if (!row.converged && rep.diagnostic.empty()) {
      std::ostringstream os;
      os << "minimizer stopped with status " << to_string(res.status) << " at eps = " << eps;
      rep.diagnostic = os.str();
    }
    if (opts.keep_fields) rep.fields_1d.push_back(sol);
    prev = std::make_pair(eps, std::move(sol));
  }
  finish(rep);
  return rep;
}

Effective1D effective_1d_spec(const FunctionalSpec& spec, double angle) {
  spec.validate();
  const double nu[2] = {std::cos(angle), std::sin(angle)};
  std::vector<double> a(static_cast<std::size_t>(spec.k), 0.0);
  for (int ell = 1; ell <= spec.k; ++ell) {
    SymTensor t = SymTensor::zero(2, ell);
    const auto& idx = multi_indices(2, ell);
    for (std::size_t c = 0; c < idx.size(); ++c) {
      double p = 1.0;
      for (int i : idx[c]) p *= nu[i];
      t.c[c] = p;
    }
    const double cn = norm_value(t, spec.norms[static_cast<std::size_t>(ell - 1)]);
    a[static_cast<std::size_t>(ell - 1)] = spec.q[static_cast<std::size_t>(ell - 1)] * cn * cn;
  }
  const double top = a.back();
  if (!(top > 0.0)) throw NumericError("effective_1d_spec: top-order norm vanishes along the normal");
  Effective1D out;
  out.scale = std::pow(top, 1.0 / (2.0 * spec.k));
  out.spec = spec;
  for (int ell = 1; ell <= spec.k; ++ell) {
    out.spec.q[static_cast<std::size_t>(ell - 1)] =
        ell == spec.k ? 1.0 : a[static_cast<std::size_t>(ell - 1)] * std::pow(out.scale, -2.0 * ell);
  }
  out.spec.eps = 1.0;
  return out;
}

GammaReport run_gamma_2d(const FunctionalSpec& spec, double angle, const std::vector<double>& eps_schedule,
                         double predicted, const Gamma2DOptions& opts) {
  spec.validate();
  check_schedule(eps_schedule);
  const Effective1D eff = effective_1d_spec(spec, angle);
  ProfileProblem pp;
  pp.spec = eff.spec;
  pp.T = opts.profile_T;
  pp.h = default_profile_h(spec.k);
  const ProfileSolution prof = solve_profile(pp, std::nullopt, opts.profile);
  if (prof.status == ProfileStatus::Unbounded) {
    GammaReport rep;
    rep.predicted = predicted;
    rep.unbounded = true;
    rep.diagnostic = "1D profile unbounded: " + prof.diagnostic;
    return rep;
  }

  GammaReport rep;
  rep.predicted = predicted;
  const std::size_t band = static_cast<std::size_t>(spec.k) + 1;
  for (double eps : eps_schedule) {
    const std::size_t cells = opts.cells > 0 ? opts.cells : static_cast<std::size_t>(std::ceil(6.0 / eps - 1e-9));
    const Grid2D g = Grid2D::rotated(angle, cells, 1.0, false);
    Field2D rec = Field2D::constant(g, 0.0);
    for (std::size_t j = 0; j < g.nt(); ++j) {
      for (std::size_t i = 0; i < g.ns(); ++i) {
        const std::size_t n = g.index(i, j);
        rec.u[n] = sample_field(prof.field, g.t(j) / (eps * eff.scale));
        if (i < band || j < band || i + band >= g.ns() || j + band >= g.nt()) rec.mask[n] = NodeState::Fixed;
      }
    }
    const DiscreteFunctional df(g, spec.with_eps(eps));
    const double rec_energy = df.value(rec.u);
    const MinimizeResult res = minimize(df, rec.u, rec.mask, opts.minimizer);
    Field2D sol = rec;
    sol.u = res.u;

    GammaRow row;
    row.eps = eps;
    row.energy = res.energy;
    row.recovery_energy = rec_energy;
    double d = 0.0;
    std::vector<double> column;
    for (std::size_t j = 0; j < g.nt(); ++j) {
      for (std::size_t i = 0; i < g.ns(); ++i) {
        const double target = g.t(j) > 0 ? 1.0 : (g.t(j) < 0 ? -1.0 : 0.0);
        const double v = sol.u[g.index(i, j)];
        d += g.weight(i, j) * (v - target) * (v - target);
      }
      column.push_back(sol.u[g.index(g.ns() / 2, j)]);
    }
    row.l2dist = std::sqrt(d);
    row.transitions = count_transitions(column);
    row.converged = res.converged(opts.minimizer);
    rep.rows.push_back(row);
    if (opts.keep_fields) rep.fields_2d.push_back(sol);
    if (res.status == MinimizeStatus::Unbounded || res.energy < -1e-9) {
      rep.unbounded = true;
      std::ostringstream os;
      os << "unbounded at eps = " << eps << " (energy " << res.energy << ")";
      rep.diagnostic = os.str();
      break;
    }
    if (!row.converged && rep.diagnostic.empty()) {
      std::ostringstream os;
      os << "minimizer stopped with status " << to_string(res.status) << " at eps = " << eps;
      rep.diagnostic = os.str();
    }
  }
  finish(rep);
  return rep;
}

ProbeReport compactness_probe(const std::vector<Field1D>& fields, const std::vector<double>& energies,
                              std::optional<double> bound) {
  if (fields.size() != energies.size()) throw ArgumentError("compactness_probe: fields and energies differ in length");
  if (fields.empty()) throw ArgumentError("compactness_probe: empty sequence");
  ProbeReport rep;
  const double limit = bound.value_or(4.0 * std::max(energies.front(), 1.0));
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!std::isfinite(energies[i]) || energies[i] > limit) {
      std::ostringstream os;
      os << "energies not uniformly bounded: entry " << i << " = " << energies[i] << " exceeds " << limit;
      rep.declined = true;
      rep.reason = os.str();
      return rep;
    }
  }
  for (const auto& f : fields) {
    rep.distances.push_back(l2_to_sign(f));
    rep.transitions.push_back(count_transitions(f.u));
  }
  rep.distance_decreasing = true;
  for (std::size_t i = 1; i < rep.distances.size(); ++i) {
    if (rep.distances[i] > rep.distances[i - 1] * (1.0 + 1e-9) + 1e-12) rep.distance_decreasing = false;
  }
  const auto n = rep.transitions.size();
  rep.transitions_stable = n < 2 || rep.transitions[n - 1] == rep.transitions[n - 2];
  return rep;
}

}  // namespace phaseflow
