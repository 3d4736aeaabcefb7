#include "phaseflow/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "phaseflow/errors.hpp"

namespace phaseflow {
namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kRangeSlack = 1e-12;

// Fritsch-Carlson slopes: zero at local extrema, harmonic-mean style limiter
// elsewhere so every interval stays monotone.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  if (n == 2) {
    d[0] = d[1] = secant[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = secant[i - 1];
    const double b = secant[i];
    if (a * b <= 0.0) {
      d[i] = 0.0;
    } else {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      d[i] = (w1 + w2) / (w1 / a + w2 / b);
    }
  }
  // one-sided three-point ends, limited to keep monotonicity
  auto end_slope = [](double h0, double h1, double s0, double s1) {
    double e = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (e * s0 <= 0.0) return 0.0;
    if (s0 * s1 <= 0.0 && std::abs(e) > 3.0 * std::abs(s0)) return 3.0 * s0;
    return e;
  };
  d[0] = end_slope(x[1] - x[0], x[2] - x[1], secant[0], secant[1]);
  d[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], secant[n - 2], secant[n - 3]);
  return d;
}

}  // namespace

Potential Potential::quartic() {
  Potential w;
  w.kind_ = PotentialKind::QuarticStandard;
  return w;
}

Potential Potential::table(std::vector<double> abscissae, std::vector<double> values,
                           Extrapolation extrapolation) {
  if (abscissae.size() != values.size()) {
    throw ArgumentError("potential table: abscissae and values differ in length");
  }
  if (abscissae.size() < 3) throw ArgumentError("potential table: need at least 3 samples");
  std::vector<std::size_t> order(abscissae.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return abscissae[a] < abscissae[b]; });
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i : order) {
    if (!std::isfinite(abscissae[i]) || !std::isfinite(values[i])) {
      throw ArgumentError("potential table: non-finite sample");
    }
    if (values[i] < 0.0) throw ArgumentError("potential table: negative energy density");
    if (!x.empty() && abscissae[i] <= x.back()) {
      throw ArgumentError("potential table: duplicate abscissa");
    }
    x.push_back(abscissae[i]);
    y.push_back(values[i]);
  }
  if (x.front() > -1.0 || x.back() < 1.0) {
    throw ArgumentError("potential table: abscissae must cover both wells [-1, 1]");
  }
  // Pin the wells: force knots at +-1 to zero.
  for (double well : {-1.0, 1.0}) {
    auto it = std::lower_bound(x.begin(), x.end(), well - kZeroTol);
    if (it != x.end() && std::abs(*it - well) <= kZeroTol) {
      y[static_cast<std::size_t>(it - x.begin())] = 0.0;
    } else {
      const auto pos = it - x.begin();
      x.insert(it, well);
      y.insert(y.begin() + pos, 0.0);
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool at_well = std::abs(x[i] + 1.0) <= kZeroTol || std::abs(x[i] - 1.0) <= kZeroTol;
    if (!at_well && y[i] <= kZeroTol) {
      std::ostringstream msg;
      msg << "potential table: W vanishes at s = " << x[i] << " away from the wells";
      throw ArgumentError(msg.str());
    }
  }

  Potential w;
  w.kind_ = PotentialKind::Table;
  w.extrapolation_ = extrapolation;
  w.slopes_ = monotone_slopes(x, y);
  w.knots_ = std::move(x);
  w.values_ = std::move(y);
  // Midpoint scan: the interpolant itself must not touch zero between knots.
  for (std::size_t i = 0; i + 1 < w.knots_.size(); ++i) {
    const double mid = 0.5 * (w.knots_[i] + w.knots_[i + 1]);
    if (w.value(mid) <= kZeroTol) {
      std::ostringstream msg;
      msg << "potential table: interpolant vanishes near s = " << mid;
      throw ArgumentError(msg.str());
    }
  }
  const auto& k = w.knots_;
  const auto& v = w.values_;
  w.even_ = true;
  for (std::size_t i = 0, j = k.size() - 1; i < j; ++i, --j)
    if (std::abs(k[i] + k[j]) > 1e-12 || std::abs(v[i] - v[j]) > 1e-12 * std::max(1.0, std::abs(v[i]))) w.even_ = false;
  if (k.size() % 2 == 1 && std::abs(k[k.size() / 2]) > 1e-12) w.even_ = false;
  return w;
}

Potential Potential::load_csv(const std::filesystem::path& path, Extrapolation extrapolation) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open potential table " + path.string());
  std::string line;
  bool header_seen = false;
  std::vector<double> s;
  std::vector<double> w;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "s,w") {
        throw ArgumentError(path.string() + ": expected header line 's,w'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    try {
      s.push_back(std::stod(line.substr(0, comma)));
      w.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  if (!header_seen) throw ArgumentError(path.string() + ": empty potential table");
  return table(std::move(s), std::move(w), extrapolation);
}

void Potential::check_range(double s) const {
  if (extrapolation_ == Extrapolation::None &&
      (s < knots_.front() - kRangeSlack || s > knots_.back() + kRangeSlack)) {
    std::ostringstream msg;
    msg << "potential table queried at s = " << s << " outside [" << knots_.front() << ", "
        << knots_.back() << "]";
    throw RangeError(msg.str());
  }
}

std::size_t Potential::interval_of(double s) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

double Potential::value(double s) const {
  if (kind_ == PotentialKind::QuarticStandard) {
    const double a = 1.0 - s * s;
    return a * a;
  }
  check_range(s);
  if (s < knots_.front()) return std::max(0.0, values_.front() + slopes_.front() * (s - knots_.front()));
  if (s > knots_.back()) return std::max(0.0, values_.back() + slopes_.back() * (s - knots_.back()));
  const std::size_t i = interval_of(s);
  const double h = knots_[i + 1] - knots_[i];
  const double t = (s - knots_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double v = (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
                   (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
  return std::max(0.0, v);
}

double Potential::slope(double s) const {
  if (kind_ == PotentialKind::QuarticStandard) return -4.0 * s * (1.0 - s * s);
  check_range(s);
  if (s < knots_.front()) return value(s) > 0.0 ? slopes_.front() : 0.0;
  if (s > knots_.back()) return value(s) > 0.0 ? slopes_.back() : 0.0;
  const std::size_t i = interval_of(s);
  const double h = knots_[i + 1] - knots_[i];
  const double t = (s - knots_[i]) / h;
  const double t2 = t * t;
  const double raw = (2 * t2 * t - 3 * t2 + 1) * values_[i] +
                     (t2 * t - 2 * t2 + t) * h * slopes_[i] + (-2 * t2 * t + 3 * t2) * values_[i + 1] +
                     (t2 * t - t2) * h * slopes_[i + 1];
  if (raw < 0.0) return 0.0;
  return ((6 * t2 - 6 * t) * values_[i] + (3 * t2 - 4 * t + 1) * h * slopes_[i] +
          (-6 * t2 + 6 * t) * values_[i + 1] + (3 * t2 - 2 * t) * h * slopes_[i + 1]) /
         h;
}

double Potential::curvature(double s) const {
  if (kind_ == PotentialKind::QuarticStandard) return 12.0 * s * s - 4.0;
  check_range(s);
  if (s < knots_.front() || s > knots_.back()) return 0.0;
  const std::size_t i = interval_of(s);
  const double h = knots_[i + 1] - knots_[i];
  const double t = (s - knots_[i]) / h;
  return ((12 * t - 6) * values_[i] + (6 * t - 4) * h * slopes_[i] + (-12 * t + 6) * values_[i + 1] +
          (6 * t - 2) * h * slopes_[i + 1]) /
         (h * h);
}

bool Potential::is_even() const { return kind_ == PotentialKind::QuarticStandard || even_; }

std::string Potential::describe() const {
  return kind_ == PotentialKind::QuarticStandard ? "quartic" : "table";
}

double eval_potential(const Potential& w, double s) { return w.value(s); }
double eval_potential_slope(const Potential& w, double s) { return w.slope(s); }

std::vector<double> uniform_samples(double lower, double upper, double step) {
  if (!(upper > lower) || !(step > 0.0)) throw ArgumentError("uniform_samples: bad range or step");
  const auto n = static_cast<std::size_t>(std::llround((upper - lower) / step));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = lower + (upper - lower) * static_cast<double>(i) / static_cast<double>(n);
  return out;
}

HypothesisReport check_hypotheses(const Potential& w, std::span<const double> grid, double alpha,
                                  double beta) {
  if (grid.empty()) throw ArgumentError("check_hypotheses: empty sample grid");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ArgumentError("check_hypotheses: alpha, beta must be positive");

  std::vector<double> s(grid.begin(), grid.end());
  std::sort(s.begin(), s.end());
  HypothesisReport rep;
  rep.samples = s.size();
  rep.lower = s.front();
  rep.upper = s.back();
  rep.alpha = alpha;
  rep.beta = beta;
  for (std::size_t i = 1; i < s.size(); ++i) rep.resolution = std::max(rep.resolution, s[i] - s[i - 1]);

  std::vector<double> values(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) values[i] = w.value(s[i]);

  auto record = [](HypothesisCheck& c, double state, double margin) {
    if (margin < c.worst_margin || (c.pass && c.worst_margin == 0.0 && margin < 0.0)) {
      c.worst_margin = margin;
      c.worst_state = state;
    }
    if (margin < 0.0) c.pass = false;
  };
  rep.zeros_only_at_wells.worst_margin = std::numeric_limits<double>::infinity();
  rep.quadratic_growth.worst_margin = std::numeric_limits<double>::infinity();
  rep.monotone_envelope.worst_margin = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s[i];
    const double v = values[i];
    // (H1): away from the wells W must be strictly positive; at the wells it must vanish.
    const bool near_well = std::abs(x - 1.0) <= kZeroTol || std::abs(x + 1.0) <= kZeroTol;
    record(rep.zeros_only_at_wells, x, near_well ? kZeroTol - v : v - kZeroTol);
    // (H2)
    const double growth = alpha * std::min((x + 1.0) * (x + 1.0), (x - 1.0) * (x - 1.0));
    record(rep.quadratic_growth, x, v - growth + kZeroTol);
  }

  // (H3): for each t, max over |s| <= |t| of W(s) must not exceed beta*W(t) + beta.
  std::vector<std::size_t> by_abs(s.size());
  std::iota(by_abs.begin(), by_abs.end(), 0);
  std::sort(by_abs.begin(), by_abs.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(s[a]) < std::abs(s[b]); });
  double running_max = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < by_abs.size();) {
    // a group of equal |s| values compares in both directions
    std::size_t end = g;
    const double key = std::abs(s[by_abs[g]]);
    while (end < by_abs.size() && std::abs(s[by_abs[end]]) == key) {
      running_max = std::max(running_max, values[by_abs[end]]);
      ++end;
    }
    for (std::size_t j = g; j < end; ++j) {
      const std::size_t t = by_abs[j];
      record(rep.monotone_envelope, s[t], beta * values[t] + beta - running_max + kZeroTol);
    }
    g = end;
  }
  return rep;
}

}  // namespace phaseflow
