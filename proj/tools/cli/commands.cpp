#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>

#include "phaseflow/cell2d.hpp"
#include "phaseflow/errors.hpp"
#include "phaseflow/field_io.hpp"
#include "phaseflow/gamma.hpp"
#include "phaseflow/interpolation.hpp"
#include "phaseflow/potential.hpp"
#include "phaseflow/profile1d.hpp"
#include "phaseflow/tensor.hpp"

namespace phaseflow::cli {

namespace {

Potential load_well(const RunConfig& c) {
  const auto well = c.text("well");
  if (well == "quartic") return Potential::quartic();
  const auto ex = c.text("extrapolation") == "linear" ? Extrapolation::Linear : Extrapolation::None;
  return Potential::load_csv(well, ex);
}

FunctionalSpec load_spec(const RunConfig& c) {
  const int k = static_cast<int>(c.integer("k"));
  auto q = c.reals("q");
  if (q.empty()) {
    q.assign(static_cast<std::size_t>(k), 0.0);
    q.back() = 1.0;
  }
  return FunctionalSpec::make(k, q, 1.0, parse_norm_token(c.text("norm")), load_well(c));
}

MinimizeOptions minimizer(const RunConfig& c) {
  MinimizeOptions m;
  m.method = c.text("method") == "lbfgs" ? MinimizerMethod::LBFGS : MinimizerMethod::Newton;
  return m;
}

double profile_h(const RunConfig& c, int k) { return c.real("h") > 0.0 ? c.real("h") : default_profile_h(k); }

json spec_json(const FunctionalSpec& s) {
  return json{{"k", s.k}, {"q", s.q}, {"norm", norm_token(s.norms.back())}, {"well", s.potential.describe()}};
}

json report_json(const InterpolationReport& r) {
  return json{{"ell", r.ell}, {"k", r.k}, {"q", r.q}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio},
              {"pass", r.pass}};
}

/// Reads a `t,u` CSV (or PHF1 binary) 1D field on a uniform grid.
Field1D read_any_field(const std::string& path) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open field " + path);
    char magic[4] = {};
    probe.read(magic, 4);
    if (probe && std::string(magic, 4) == "PHF1") return read_field_binary_1d(path);
  }
  std::ifstream in(path);
  std::vector<double> t, u;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "t,u") throw UsageError(path + ": expected header 't,u'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      t.push_back(std::stod(line.substr(0, comma)));
      u.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw UsageError(path + ": malformed row '" + line + "'");
    }
  }
  if (t.size() < 4) throw UsageError(path + ": need at least 4 nodes");
  Grid1D g{t.front(), t.back(), t.size() - 2};
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - g.x(i)) > 1e-9 * std::max(1.0, std::abs(g.b - g.a)))
      throw UsageError(path + ": nodes are not uniformly spaced");
  Field1D f = Field1D::constant(g, 0.0);
  f.u = u;
  return f;
}

int run_profile(const RunConfig& c, OutputSet& out) {
  const auto spec = load_spec(c);
  ProfileOptions po;
  po.minimizer = minimizer(c);
  po.multistart = c.flag("multistart");
  po.seed = c.seed();
  po.threads = c.threads;
  const auto m = estimate_m(spec, c.reals("T"), c.real("tol"), po, profile_h(c, spec.k));

  std::vector<CsvRow> rows;
  for (const auto& [T, v] : m.table) rows.push_back({num(T), num(v)});
  out.csv("m_table.csv", {"T", "m"}, rows);

  json sols = json::array();
  for (std::size_t i = 0; i < m.solutions.size(); ++i) {
    const auto& s = m.solutions[i];
    sols.push_back({{"T", i < m.table.size() ? m.table[i].first : std::numeric_limits<double>::quiet_NaN()},
                    {"energy", s.energy},
                    {"status", to_string(s.status)},
                    {"iterations", s.iterations},
                    {"grad_norm", s.grad_norm},
                    {"starts", s.starts},
                    {"multistart_spread", s.multistart_spread}});
  }
  json body{{"spec", spec_json(spec)}, {"h", profile_h(c, spec.k)}, {"m_hat", m.m_hat},
            {"converged", m.converged}, {"monotone", m.monotone}, {"unbounded", m.unbounded},
            {"diagnostic", m.diagnostic}, {"solutions", sols}};
  if (!m.solutions.empty()) {
    const auto tails = tail_diagnostics(m.solutions.back(), spec.k, c.real("tail-threshold"));
    body["tails"] = {{"max_abs", tails.max_abs}, {"threshold", tails.threshold}, {"pass", tails.pass}};
    body["field"] = out.field("profile", m.solutions.back().field);
  }
  out.json_file("profile.json", body);

  std::cout << "m_hat = " << num(m.m_hat) << (m.converged ? "" : " (not converged)") << "\n";
  if (m.unbounded) {
    std::cerr << "Unbounded: " << m.diagnostic << "\n";
    return 1;
  }
  if (!m.monotone) {
    std::cerr << "m(T) is not nonincreasing\n";
    return 1;
  }
  if (!m.converged) std::cerr << "warning: m(T) did not settle within tol " << c.real("tol") << "\n";
  return 0;
}

int run_interp(const RunConfig& c, OutputSet& out) {
  const int k = static_cast<int>(c.integer("k"));
  const int ell = static_cast<int>(c.integer("ell"));
  const auto w = load_well(c);
  const double eps = c.real("eps");

  if (!c.flag("adversarial")) {
    const auto f = read_any_field(c.text("field"));
    const auto rep = eps > 0.0 ? check_scaled(f, eps, ell, k, w, c.real("q-test"))
                               : check_unit_interval(f, ell, k, w, c.real("q-test"));
    auto body = report_json(rep);
    body["eps"] = eps;
    out.json_file("interp.json", body);
    std::cout << "ratio = " << num(rep.ratio) << (rep.pass ? " pass" : " FAIL") << "\n";
    return rep.pass ? 0 : 1;
  }

  ThresholdOptions to;
  to.budget = static_cast<std::size_t>(c.integer("budget"));
  to.seed = c.seed();
  to.threads = c.threads;
  std::vector<ThresholdResult> results;
  bool agree = true;
  if (c.text("family") == "all") {
    auto est = estimate_threshold(ell, k, w, to);
    results = std::move(est.per_family);
    agree = est.families_agree;
  } else {
    results.push_back(adversarial_threshold(ell, k, w, parse_family(c.text("family")), to));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].q_hat < results[best].q_hat) best = i;
  const double q_hat = results[best].q_hat;
  const double q = c.real("q-test") > 0.0 ? c.real("q-test") : 0.9 * q_hat;

  const auto rep = check_unit_interval(results[best].maximizer, ell, k, w, q);
  auto body = report_json(rep);
  body["q_hat"] = q_hat;
  body["families_agree"] = agree;
  json fams = json::array();
  for (const auto& r : results)
    fams.push_back({{"family", to_string(r.family)}, {"r_max", r.r_max}, {"q_hat", r.q_hat},
                    {"evaluated", r.evaluated}, {"description", r.description}});
  body["families"] = fams;
  body["maximizer"] = out.field("interp_maximizer", results[best].maximizer);

  std::size_t violations = 0;
  const auto tests = static_cast<std::size_t>(c.integer("tests"));
  if (tests > 0) {
    for (const auto& f : random_test_functions(tests, k, c.seed() + 1))
      if (!check_unit_interval(f, ell, k, w, q).pass) ++violations;
    body["tests"] = {{"count", tests}, {"violations", violations}};
  }
  out.json_file("interp.json", body);

  std::cout << "q_hat(" << ell << "," << k << ") = " << num(q_hat) << (agree ? "" : " (families disagree)")
            << "\n";
  if (violations > 0) {
    std::cerr << violations << " of " << tests << " test functions violate the inequality at q = " << num(q)
              << "\n";
    return 1;
  }
  return 0;
}

std::vector<double> cell_angles(const RunConfig& c) {
  std::vector<double> angles;
  if (const auto n = c.integer("angles"); n > 0) {
    for (long long i = 0; i < n; ++i) angles.push_back(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  } else {
    for (const auto& t : c.texts("nu")) angles.push_back(parse_angle(t));
  }
  return angles;
}

int run_cell(const RunConfig& c, OutputSet& out) {
  const auto spec = load_spec(c);
  const auto eps = c.reals("eps");
  const auto angles = cell_angles(c);
  CellOptions co;
  co.minimizer = minimizer(c);
  co.perturbed_starts = static_cast<int>(c.integer("starts"));
  co.seed = c.seed();
  co.threads = c.threads;
  CellProblem base;
  base.cells = static_cast<std::size_t>(c.integer("cells"));
  base.r_band = c.real("r-band");
  base.lateral = c.text("lateral") == "clamped" ? LateralMode::Clamped : LateralMode::Periodic;

  const auto scan = anisotropy_scan(spec, angles, eps, c.real("tol"), co, base);

  std::vector<CsvRow> table, polar;
  for (const auto& g : scan)
    for (const auto& [e, v] : g.table) table.push_back({num(g.angle), num(e), num(v)});
  for (const auto& [a, g] : polar_table(scan)) polar.push_back({num(a), num(g)});
  out.csv("cell_table.csv", {"angle", "epsilon", "g"}, table);
  out.csv("cell_polar.csv", {"angle", "g_final"}, polar);

  json per = json::array();
  bool failed = false;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const auto& g = scan[i];
    failed = failed || g.unbounded || !g.converged;
    json e{{"angle", g.angle}, {"g_hat", g.g_hat}, {"converged", g.converged}, {"unbounded", g.unbounded},
           {"diagnostic", g.diagnostic}, {"status", to_string(g.last.status)}, {"iterations", g.last.iterations},
           {"cells", g.last.solution.grid.cells}};
    if (!g.unbounded && !g.last.solution.u.empty()) {
      e["concentration"] = potential_concentration(g.last, spec);
      e["lateral_variation"] = lateral_variation(g.last.solution);
      e["field"] = out.field("cell_field_" + std::to_string(i), g.last.solution);
    }
    per.push_back(e);
  }
  const auto pos = positivity_check(scan, c.real("tol"));
  failed = failed || !pos.pass;
  json body{{"spec", spec_json(spec)},
            {"eps", eps},
            {"angles", per},
            {"positivity", {{"pass", pos.pass}, {"min_g", pos.min_g}, {"offending_angles", pos.offending_angles}}}};
  if (c.flag("basis-check")) {
    json checks = json::array();
    for (double a : angles) {
      const auto b = basis_independence_check(a, spec, eps.back(), co);
      checks.push_back({{"angle", a}, {"g_plus", b.g_plus}, {"g_minus", b.g_minus}, {"spread", b.spread},
                        {"pass", b.pass}, {"warning", b.warning}});
    }
    body["basis_check"] = checks;
  }
  out.json_file("cell.json", body);

  for (const auto& g : scan)
    std::cout << "g(" << num(g.angle) << ") = " << num(g.g_hat) << (g.unbounded ? " Unbounded" : "")
              << (g.converged ? "" : " (not converged)") << "\n";
  for (const auto& g : scan)
    if (g.unbounded) std::cerr << "Unbounded at angle " << num(g.angle) << ": " << g.diagnostic << "\n";
  if (!pos.pass) std::cerr << "positivity check failed (min g = " << num(pos.min_g) << ")\n";
  return failed ? 1 : 0;
}

json gamma_json(const GammaReport& r) {
  return json{{"predicted", r.predicted}, {"unbounded", r.unbounded}, {"diagnostic", r.diagnostic},
              {"liminf_ok", r.liminf_ok}, {"limsup_ok", r.limsup_ok}, {"trend_ok", r.trend_ok},
              {"ordered", r.ordered}};
}

void gamma_table(const GammaReport& r, OutputSet& out) {
  std::vector<CsvRow> rows;
  for (const auto& row : r.rows)
    rows.push_back({num(row.eps), num(row.energy), num(row.recovery_energy), num(row.l2dist),
                    std::to_string(row.transitions)});
  out.csv("gamma.csv", {"epsilon", "energy", "recovery_energy", "l2dist", "transitions"}, rows);
}

int gamma_exit(const GammaReport& r) {
  if (r.unbounded) {
    std::cerr << "Unbounded: " << r.diagnostic << "\n";
    return 1;
  }
  if (!r.liminf_ok || !r.limsup_ok) {
    std::cerr << "energies do not bracket F0 = " << num(r.predicted) << " at the smallest eps\n";
    return 1;
  }
  return 0;
}

int run_gamma(const RunConfig& c, OutputSet& out) {
  const auto spec = load_spec(c);
  const auto eps = c.reals("eps");
  ProfileOptions po;
  po.minimizer = minimizer(c);
  po.seed = c.seed();
  po.threads = c.threads;

  if (c.integer("dim") == 2) {
    auto table_path = c.text("g-table");
    if (table_path.empty()) {
      const auto prior = c.out_dir() / "cell_polar.csv";
      if (!std::filesystem::exists(prior)) {
        std::cerr << "g table missing: run `cell` into " << c.out_dir().string() << " first or pass --g-table\n";
        return 1;
      }
      table_path = prior.string();
    }
    const auto table = GTable::load_csv(table_path);
    const double angle = parse_angle(c.text("nu"));
    double predicted = 0.0;
    try {
      predicted = predicted_limit(InterfaceSpec::flat(angle), table);
    } catch (const ArgumentError& e) {
      std::cerr << e.what() << "\n";
      return 1;
    }
    Gamma2DOptions go;
    go.cells = static_cast<std::size_t>(c.integer("cells"));
    go.minimizer = minimizer(c);
    go.profile = po;
    go.profile_T = c.reals("T").back();
    go.keep_fields = true;
    const auto rep = run_gamma_2d(spec, angle, eps, predicted, go);
    gamma_table(rep, out);
    auto body = gamma_json(rep);
    body["dim"] = 2;
    body["angle"] = angle;
    body["g_table"] = table_path;
    body["spec"] = spec_json(spec);
    if (!rep.fields_2d.empty()) body["field"] = out.field("gamma_field", rep.fields_2d.back());
    out.json_file("gamma.json", body);
    std::cout << "F0 = " << num(predicted) << "\n";
    return gamma_exit(rep);
  }

  const auto m = estimate_m(spec, c.reals("T"), c.real("tol"), po, profile_h(c, spec.k));
  if (m.unbounded || m.solutions.empty()) {
    GammaReport rep;
    rep.unbounded = true;
    rep.diagnostic = "profile problem: " + m.diagnostic;
    gamma_table(rep, out);
    auto body = gamma_json(rep);
    body["dim"] = 1;
    body["spec"] = spec_json(spec);
    out.json_file("gamma.json", body);
    return gamma_exit(rep);
  }
  Gamma1DOptions go;
  go.n = static_cast<std::size_t>(c.integer("n"));
  go.minimizer = minimizer(c);
  go.profile = m.solutions.back().field;
  const double predicted = predicted_limit(InterfaceSpec::jumps_1d({0.5 * (go.a + go.b)}), m.m_hat);
  const auto rep = run_gamma_1d(spec, eps, predicted, go);
  gamma_table(rep, out);
  auto body = gamma_json(rep);
  body["dim"] = 1;
  body["m_hat"] = m.m_hat;
  body["spec"] = spec_json(spec);
  if (!rep.fields_1d.empty() && rep.fields_1d.size() == rep.rows.size()) {
    std::vector<double> energies;
    for (const auto& r : rep.rows) energies.push_back(r.energy);
    const auto probe = compactness_probe(rep.fields_1d, energies);
    body["compactness"] = {{"declined", probe.declined}, {"reason", probe.reason},
                           {"distances", probe.distances}, {"transitions", probe.transitions},
                           {"distance_decreasing", probe.distance_decreasing},
                           {"transitions_stable", probe.transitions_stable}};
    body["field"] = out.field("gamma_field", rep.fields_1d.back());
  }
  out.json_file("gamma.json", body);
  std::cout << "F0 = " << num(predicted) << "\n";
  return gamma_exit(rep);
}

int run_norms(const RunConfig& c, OutputSet& out) {
  const int d = static_cast<int>(c.integer("d"));
  const int ell = static_cast<int>(c.integer("ell"));
  const auto a = parse_norm_token(c.text("norm"));
  const auto b = parse_norm_token(c.text("compare"));
  const auto eq = equivalence_constants(a, b, d, ell, static_cast<int>(c.integer("budget")), c.seed());

  json labels = json::array();
  for (const auto& idx : multi_indices(d, ell)) labels.push_back(index_label(idx));
  json body{{"d", d}, {"ell", ell}, {"norm", norm_token(a)}, {"compare", norm_token(b)}, {"components", labels},
            {"c_low", eq.c_low}, {"c_high", eq.c_high}};
  const auto comps = c.reals("tensor");
  if (!comps.empty()) {
    if (comps.size() != component_count(d, ell))
      throw UsageError("--tensor needs " + std::to_string(component_count(d, ell)) + " components for d = " +
                       std::to_string(d) + ", ell = " + std::to_string(ell));
    SymTensor t = SymTensor::zero(d, ell);
    t.c = comps;
    body["value"] = norm_value(t, a);
    body["compare_value"] = norm_value(t, b);
    if (a.kind == NormKind::Operatorial) body["direction"] = operatorial_norm(t).direction;
  }
  if (a.kind == NormKind::WeightedFrobenius) {
    std::vector<CsvRow> rows;
    for (const auto& idx : multi_indices(d, ell)) rows.push_back({index_label(idx), num(a.weight(idx))});
    out.csv("weights.csv", {"index", "weight"}, rows);
  }
  out.json_file("norms.json", body);
  std::cout << "c_low = " << num(eq.c_low) << ", c_high = " << num(eq.c_high) << "\n";
  return 0;
}

int run_check_well(const RunConfig& c, OutputSet& out) {
  const auto w = load_well(c);
  const auto grid = uniform_samples(c.real("lower"), c.real("upper"), c.real("step"));
  const auto rep = check_hypotheses(w, grid, c.real("alpha"), c.real("beta"));
  std::vector<CsvRow> rows;
  rows.reserve(grid.size());
  for (double s : grid) rows.push_back({num(s), num(w.value(s))});
  out.csv("well.csv", {"s", "w"}, rows);
  auto check = [](const HypothesisCheck& h) {
    return json{{"pass", h.pass}, {"worst_state", h.worst_state}, {"worst_margin", h.worst_margin}};
  };
  out.json_file("check_well.json", {{"well", w.describe()},
                                    {"zeros_only_at_wells", check(rep.zeros_only_at_wells)},
                                    {"quadratic_growth", check(rep.quadratic_growth)},
                                    {"monotone_envelope", check(rep.monotone_envelope)},
                                    {"resolution", rep.resolution},
                                    {"lower", rep.lower},
                                    {"upper", rep.upper},
                                    {"samples", rep.samples},
                                    {"alpha", rep.alpha},
                                    {"beta", rep.beta},
                                    {"pass", rep.all_pass()}});
  std::cout << (rep.all_pass() ? "hypotheses hold on the sample grid" : "hypothesis check failed") << "\n";
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int run_command(const RunConfig& config, OutputSet& out) {
  const auto& cmd = config.command;
  if (cmd == "profile") return run_profile(config, out);
  if (cmd == "interp") return run_interp(config, out);
  if (cmd == "cell") return run_cell(config, out);
  if (cmd == "gamma") return run_gamma(config, out);
  if (cmd == "norms") return run_norms(config, out);
  if (cmd == "check-well") return run_check_well(config, out);
  throw UsageError("unknown subcommand '" + cmd + "'");
}

}  // namespace phaseflow::cli
