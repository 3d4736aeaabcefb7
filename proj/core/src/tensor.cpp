#include "phaseflow/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "phaseflow/errors.hpp"

namespace phaseflow {
namespace {

constexpr int kMaxDim = 3;
constexpr int kMaxOrder = 8;

struct IndexTable {
  std::vector<std::vector<int>> idx;
  std::vector<double> mult;
};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

IndexTable build_table(int d, int ell) {
  IndexTable t;
  std::vector<int> cur(static_cast<std::size_t>(ell), 0);
  while (true) {
    t.idx.push_back(cur);
    std::array<int, kMaxDim> counts{};
    for (int i : cur) ++counts[static_cast<std::size_t>(i)];
    double m = factorial(ell);
    for (int j = 0; j < d; ++j) m /= factorial(counts[static_cast<std::size_t>(j)]);
    t.mult.push_back(m);
    // next nondecreasing tuple
    int pos = ell - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == d - 1) --pos;
    if (pos < 0) break;
    const int v = cur[static_cast<std::size_t>(pos)] + 1;
    for (int p = pos; p < ell; ++p) cur[static_cast<std::size_t>(p)] = v;
  }
  return t;
}

const IndexTable& table(int d, int ell) {
  static const auto tables = [] {
    std::array<std::array<IndexTable, kMaxOrder + 1>, kMaxDim + 1> all;
    for (int d = 1; d <= kMaxDim; ++d)
      for (int l = 1; l <= kMaxOrder; ++l)
        all[static_cast<std::size_t>(d)][static_cast<std::size_t>(l)] = build_table(d, l);
    return all;
  }();
  if (d < 1 || d > kMaxDim || ell < 1 || ell > kMaxOrder) {
    throw ArgumentError("tensor: unsupported (d, ell) = (" + std::to_string(d) + ", " +
                        std::to_string(ell) + ")");
  }
  return tables[static_cast<std::size_t>(d)][static_cast<std::size_t>(ell)];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
}

// cos^n0 * sin^n1 and its first two angle derivatives
struct Mono {
  double f, d1, d2;
};

double pw(double x, int n) {
  if (n < 0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

Mono monomial(int n0, int n1, double c, double s) {
  Mono m{};
  m.f = pw(c, n0) * pw(s, n1);
  m.d1 = -n0 * pw(c, n0 - 1) * pw(s, n1 + 1) + n1 * pw(c, n0 + 1) * pw(s, n1 - 1);
  m.d2 = -n0 * (-(n0 - 1) * pw(c, n0 - 2) * pw(s, n1 + 2) + (n1 + 1) * pw(c, n0) * pw(s, n1)) +
         n1 * (-(n0 + 1) * pw(c, n0) * pw(s, n1) + (n1 - 1) * pw(c, n0 + 2) * pw(s, n1 - 2));
  return m;
}

// mult_j * cos^(ell-j) * sin^j at the sampling angles, row per angle
const std::vector<double>& sample_weights(int ell) {
  static const auto tables = [] {
    std::array<std::vector<double>, 9> t;
    for (int l = 2; l <= 8; ++l) {
      const int ns = std::max(16, 8 * l);
      const auto& mult = multiplicities(2, l);
      const auto m = static_cast<std::size_t>(l) + 1;
      t[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(ns) * m);
      for (int i = 0; i < ns; ++i) {
        const double th = i * std::numbers::pi / ns;
        for (std::size_t j = 0; j < m; ++j) {
          t[static_cast<std::size_t>(l)][static_cast<std::size_t>(i) * m + j] =
              mult[j] * monomial(l - static_cast<int>(j), static_cast<int>(j), std::cos(th), std::sin(th)).f;
        }
      }
    }
    return t;
  }();
  return tables[static_cast<std::size_t>(ell)];
}

}  // namespace

SymTensor SymTensor::zero(int d, int ell) {
  SymTensor t;
  t.d = d;
  t.ell = ell;
  t.c.assign(component_count(d, ell), 0.0);
  return t;
}

SymTensor SymTensor::unit(int d, std::vector<int> idx, double value) {
  SymTensor t = zero(d, static_cast<int>(idx.size()));
  t.at(idx) = value;
  return t;
}

double& SymTensor::at(std::span<const int> idx) { return c[component_position(d, idx)]; }
double SymTensor::at(std::span<const int> idx) const { return c[component_position(d, idx)]; }

const std::vector<std::vector<int>>& multi_indices(int d, int ell) { return table(d, ell).idx; }
const std::vector<double>& multiplicities(int d, int ell) { return table(d, ell).mult; }
std::size_t component_count(int d, int ell) { return table(d, ell).idx.size(); }

std::size_t component_position(int d, std::span<const int> idx) {
  std::vector<int> s(idx.begin(), idx.end());
  for (int i : s) {
    if (i < 0 || i >= d) throw ArgumentError("tensor: index out of range");
  }
  std::sort(s.begin(), s.end());
  const auto& t = table(d, static_cast<int>(s.size())).idx;
  auto it = std::lower_bound(t.begin(), t.end(), s);
  return static_cast<std::size_t>(it - t.begin());
}

std::string index_label(std::span<const int> idx) {
  std::string s;
  for (int i : idx) s += static_cast<char>('1' + i);
  return s;
}

double eval_form(const SymTensor& t, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != t.d) throw ArgumentError("apply_direction: dimension mismatch");
  const auto w = form_component_weights(t.d, t.ell, xi);
  return dot(w, t.c);
}

double apply_direction(const SymTensor& t, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != t.d) throw ArgumentError("apply_direction: dimension mismatch");
  if (std::abs(std::sqrt(dot(xi, xi)) - 1.0) > 1e-12) {
    throw ArgumentError("apply_direction: direction must have unit length");
  }
  return eval_form(t, xi);
}

std::vector<double> form_component_weights(int d, int ell, std::span<const double> xi) {
  const auto& tb = table(d, ell);
  std::vector<double> w(tb.idx.size());
  for (std::size_t a = 0; a < tb.idx.size(); ++a) {
    double p = tb.mult[a];
    for (int i : tb.idx[a]) p *= xi[static_cast<std::size_t>(i)];
    w[a] = p;
  }
  return w;
}

std::vector<double> form_gradient(const SymTensor& t, std::span<const double> xi) {
  const auto& tb = table(t.d, t.ell);
  std::vector<double> g(static_cast<std::size_t>(t.d), 0.0);
  for (std::size_t a = 0; a < tb.idx.size(); ++a) {
    const auto& id = tb.idx[a];
    for (int j = 0; j < t.d; ++j) {
      // differentiate each occurrence of j
      int count = 0;
      double rest = 1.0;
      for (int i : id) {
        if (i == j && count == 0) {
          ++count;
          continue;
        }
        if (i == j) ++count;
        rest *= xi[static_cast<std::size_t>(i)];
      }
      if (count == 0) continue;
      g[static_cast<std::size_t>(j)] += tb.mult[a] * t.c[a] * count * rest;
    }
  }
  return g;
}

double NormSpec::weight(std::span<const int> idx) const {
  if (kind != NormKind::WeightedFrobenius) return 1.0;
  auto it = weights.find(index_label(idx));
  return it == weights.end() ? 1.0 : it->second;
}

std::map<std::string, double> load_weights_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open weights file " + path.string());
  std::map<std::string, double> w;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "index,weight") throw ArgumentError(path.string() + ": expected header 'index,weight'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ArgumentError(path.string() + ": malformed line '" + line + "'");
    std::string key = line.substr(0, comma);
    std::sort(key.begin(), key.end());
    if (key.empty() || key.find_first_not_of("123") != std::string::npos) {
      throw ArgumentError(path.string() + ": bad index '" + key + "'");
    }
    double v = 0.0;
    try {
      v = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ArgumentError(path.string() + ": bad weight in '" + line + "'");
    }
    if (!(v > 0.0)) throw ArgumentError(path.string() + ": weights must be strictly positive");
    w[key] = v;
  }
  return w;
}

NormSpec parse_norm_token(const std::string& token) {
  if (token == "operatorial") return NormSpec::operatorial();
  if (token == "frobenius") return NormSpec::frobenius();
  if (token == "maxcomp") return NormSpec::max_component();
  if (token.rfind("wfrob:", 0) == 0) {
    NormSpec n = NormSpec::weighted(load_weights_csv(token.substr(6)));
    n.weights_path = token.substr(6);
    return n;
  }
  throw ArgumentError("unknown norm '" + token + "' (expected operatorial|frobenius|maxcomp|wfrob:<path>)");
}

std::string norm_token(const NormSpec& n) {
  switch (n.kind) {
    case NormKind::Operatorial: return "operatorial";
    case NormKind::Frobenius: return "frobenius";
    case NormKind::MaxComponent: return "maxcomp";
    case NormKind::WeightedFrobenius: return "wfrob:" + n.weights_path;
  }
  return "operatorial";
}

namespace {

// Maximizes sign * form(cos(th) x + sin(th) y) over th. On the circle the form is a
// trigonometric polynomial of degree ell, recovered from 2 ell + 1 samples.
double best_on_circle(const SymTensor& t, const std::vector<double>& x, const std::vector<double>& y, double sign) {
  const int n = 2 * t.ell + 1;
  const double pi = std::numbers::pi;
  std::vector<double> pt(x.size()), vals(n);
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * pi * j / n;
    for (std::size_t i = 0; i < x.size(); ++i) pt[i] = std::cos(th) * x[i] + std::sin(th) * y[i];
    vals[j] = sign * eval_form(t, pt);
  }
  std::vector<double> ca(t.ell + 1, 0.0), sa(t.ell + 1, 0.0);
  for (int m = 0; m <= t.ell; ++m) {
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * pi * j / n;
      ca[m] += vals[j] * std::cos(m * th);
      sa[m] += vals[j] * std::sin(m * th);
    }
    ca[m] *= (m == 0 ? 1.0 : 2.0) / n;
    sa[m] *= 2.0 / n;
  }
  auto deriv = [&](double th, int order) {
    double v = 0.0;
    for (int m = 0; m <= t.ell; ++m) {
      const double c = std::cos(m * th), s = std::sin(m * th);
      if (order == 0) v += ca[m] * c + sa[m] * s;
      else if (order == 1) v += m * (-ca[m] * s + sa[m] * c);
      else v += -m * m * (ca[m] * c + sa[m] * s);
    }
    return v;
  };
  const int samples = 16 * t.ell + 16;
  double best_th = 0.0, best_v = deriv(0.0, 0);
  for (int j = 1; j < samples; ++j) {
    const double th = 2.0 * pi * j / samples;
    if (const double v = deriv(th, 0); v > best_v) best_v = v, best_th = th;
  }
  const double half_width = 2.0 * pi / samples;
  double th = best_th;
  for (int it = 0; it < 50; ++it) {
    const double d2 = deriv(th, 2);
    if (d2 >= 0.0) break;
    const double next = std::clamp(th - deriv(th, 1) / d2, best_th - half_width, best_th + half_width);
    if (std::abs(next - th) < 1e-15) break;
    th = next;
  }
  return deriv(th, 0) > best_v ? th : best_th;
}

}  // namespace

OperatorialResult operatorial_norm(const SymTensor& t, int restarts, std::uint64_t seed) {
  if (restarts < 0) throw ArgumentError("operatorial_norm: negative restart count");
  const auto d = static_cast<std::size_t>(t.d);
  std::vector<std::vector<double>> starts;
  for (std::size_t j = 0; j < d; ++j) {
    for (double sgn : {1.0, -1.0}) {
      std::vector<double> e(d, 0.0);
      e[j] = sgn;
      starts.push_back(e);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> v(d);
    double n2 = 0.0;
    do {
      for (double& x : v) x = gauss(rng);
      n2 = dot(v, v);
    } while (n2 < 1e-20);
    normalize(v);
    starts.push_back(v);
    std::vector<double> anti = v;
    for (double& x : anti) x = -x;
    starts.push_back(anti);
  }

  OperatorialResult best;
  best.direction.assign(d, 0.0);
  best.direction[0] = 1.0;
  best.value = -1.0;
  for (double sign : {1.0, -1.0}) {
    for (const auto& s0 : starts) {
      std::vector<double> xi = s0;
      double f = sign * eval_form(t, xi);
      for (int it = 0; it < 500; ++it) {
        auto g = form_gradient(t, xi);
        for (double& x : g) x *= sign;
        const double radial = dot(g, xi);
        for (std::size_t j = 0; j < d; ++j) g[j] -= radial * xi[j];
        const double gn = std::sqrt(dot(g, g));
        if (gn < 1e-13 * std::max(1.0, std::abs(f))) break;
        for (double& x : g) x /= gn;
        // exact maximization over the great circle through xi along g
        const double theta = best_on_circle(t, xi, g, sign);
        std::vector<double> trial(d);
        for (std::size_t j = 0; j < d; ++j) trial[j] = std::cos(theta) * xi[j] + std::sin(theta) * g[j];
        normalize(trial);
        const double ft = sign * eval_form(t, trial);
        if (!(ft > f)) break;
        const double gain = ft - f;
        xi = trial;
        f = ft;
        if (gain < 1e-16 * std::max(1.0, std::abs(f))) break;
      }
      const double value = std::abs(f);
      const double slack = 1e-12 * std::max(1.0, value);
      if (value > best.value + slack ||
          (std::abs(value - best.value) <= slack && xi < best.direction)) {
        best.value = std::max(value, best.value);
        best.direction = xi;
      }
    }
  }
  best.value = std::max(best.value, 0.0);
  return best;
}

double norm_value(const SymTensor& t, const NormSpec& n) {
  const auto& tb = table(t.d, t.ell);
  switch (n.kind) {
    case NormKind::Operatorial:
      return operatorial_norm(t).value;
    case NormKind::Frobenius: {
      double s = 0.0;
      for (std::size_t a = 0; a < t.c.size(); ++a) s += tb.mult[a] * t.c[a] * t.c[a];
      return std::sqrt(s);
    }
    case NormKind::MaxComponent: {
      double m = 0.0;
      for (double x : t.c) m = std::max(m, std::abs(x));
      return m;
    }
    case NormKind::WeightedFrobenius: {
      double s = 0.0;
      for (std::size_t a = 0; a < t.c.size(); ++a) s += n.weight(tb.idx[a]) * tb.mult[a] * t.c[a] * t.c[a];
      return std::sqrt(s);
    }
  }
  return 0.0;
}

EquivalenceConstants equivalence_constants(const NormSpec& a, const NormSpec& b, int d, int ell,
                                           int budget, std::uint64_t seed) {
  if (budget < 1) throw ArgumentError("equivalence_constants: budget must be positive");
  const NormSpec frob = NormSpec::frobenius();
  std::vector<SymTensor> samples;
  for (const auto& idx : multi_indices(d, ell)) samples.push_back(SymTensor::unit(d, idx));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < budget; ++i) {
    SymTensor t = SymTensor::zero(d, ell);
    for (double& x : t.c) x = gauss(rng);
    samples.push_back(t);
  }
  EquivalenceConstants out{std::numeric_limits<double>::infinity(), 0.0};
  for (auto& t : samples) {
    const double f = norm_value(t, frob);
    if (f < 1e-300) continue;
    for (double& x : t.c) x /= f;
    const double r = norm_value(t, a) / norm_value(t, b);
    out.c_low = std::min(out.c_low, r);
    out.c_high = std::max(out.c_high, r);
  }
  return out;
}

std::vector<double> basis_change_matrix(const double frame0[2], const double frame1[2], int ell) {
  const auto& tb = table(2, ell);
  const std::size_t m = tb.idx.size();
  std::vector<double> M(m * m, 0.0);
  const double* f[2] = {frame0, frame1};
  const int tuples = 1 << ell;
  for (std::size_t beta = 0; beta < m; ++beta) {
    const auto& bi = tb.idx[beta];
    for (int code = 0; code < tuples; ++code) {
      double p = 1.0;
      int ones = 0;
      for (int pos = 0; pos < ell; ++pos) {
        const int j = (code >> pos) & 1;
        ones += j;
        p *= f[j][bi[static_cast<std::size_t>(pos)]];
      }
      // sorted frame index with `ones` entries equal to 1 sits at position `ones`
      M[beta * m + static_cast<std::size_t>(ones)] += p;
    }
  }
  return M;
}

SymTensor rotate_tensor(const SymTensor& t, const double frame0[2], const double frame1[2]) {
  if (t.d != 2) throw ArgumentError("rotate_tensor: only d = 2 is supported");
  const auto M = basis_change_matrix(frame0, frame1, t.ell);
  SymTensor out = SymTensor::zero(2, t.ell);
  const std::size_t m = t.c.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out.c[i] += M[i * m + j] * t.c[j];
  return out;
}

Operatorial2D operatorial_sq_2d(std::span<const double> c, int ell, bool want_hessian) {
  const std::size_t m = static_cast<std::size_t>(ell) + 1;
  const auto& tb = table(2, ell);
  Operatorial2D out;
  out.grad.assign(m, 0.0);
  if (want_hessian) out.hess.assign(m * m, 0.0);

  if (ell == 1) {
    out.value = c[0] * c[0] + c[1] * c[1];
    out.grad = {2.0 * c[0], 2.0 * c[1]};
    if (want_hessian) out.hess = {2.0, 0.0, 0.0, 2.0};
    out.angle = std::atan2(c[1], c[0]);
    return out;
  }

  // component j has (ell - j) indices equal to 0 and j equal to 1
  auto eval = [&](double th, std::vector<double>* w, std::vector<double>* wt, double* p1, double* p2) {
    const double co = std::cos(th);
    const double si = std::sin(th);
    double p = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const Mono mo = monomial(ell - static_cast<int>(j), static_cast<int>(j), co, si);
      const double mu = tb.mult[j];
      p += mu * mo.f * c[j];
      d1 += mu * mo.d1 * c[j];
      d2 += mu * mo.d2 * c[j];
      if (w) (*w)[j] = mu * mo.f;
      if (wt) (*wt)[j] = mu * mo.d1;
    }
    if (p1) *p1 = d1;
    if (p2) *p2 = d2;
    return p;
  };

  const int samples = std::max(16, 8 * ell);
  const double dth = std::numbers::pi / samples;
  const auto& grid_w = sample_weights(ell);
  std::vector<double> sv(static_cast<std::size_t>(samples));
  double best = -1.0;
  double bound = 0.0;
  for (std::size_t j = 0; j < m; ++j) bound += tb.mult[j] * std::abs(c[j]);
  for (int i = 0; i < samples; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j) v += grid_w[static_cast<std::size_t>(i) * m + j] * c[j];
    sv[static_cast<std::size_t>(i)] = std::abs(v);
    best = std::max(best, std::abs(v));
  }
  // safeguarded Newton on the stationarity condition inside a bracketing cell
  auto refine = [&](double th0, double f0) {
    double lo = th0 - dth;
    double hi = th0 + dth;
    double th = th0;
    for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
      double d1 = 0.0;
      double d2 = 0.0;
      const double p = eval(th, nullptr, nullptr, &d1, &d2);
      const double sgn = p >= 0.0 ? 1.0 : -1.0;
      const double g = sgn * d1;
      if (g == 0.0) break;
      if (g > 0.0) {
        lo = th;
      } else {
        hi = th;
      }
      double cand = 0.5 * (lo + hi);
      if (sgn * d2 < 0.0) {
        const double nt = th - d1 / d2;
        if (nt > lo && nt < hi) cand = nt;
      }
      if (std::abs(cand - th) < 1e-15 * (1.0 + std::abs(th))) break;
      th = cand;
    }
    const double fv = std::abs(eval(th, nullptr, nullptr, nullptr, nullptr));
    return fv >= f0 ? std::pair{th, fv} : std::pair{th0, f0};
  };
  // every sampled local maximum that could still beat the best sample
  const double gain = 0.5 * ell * ell * bound * dth * dth;
  double th = 0.0;
  double fbest = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double v = sv[static_cast<std::size_t>(i)];
    const double prev = sv[static_cast<std::size_t>((i + samples - 1) % samples)];
    const double next = sv[static_cast<std::size_t>((i + 1) % samples)];
    if (v < prev || v < next || v + gain < best) continue;
    const auto [t, f] = refine(i * dth, v);
    if (f > fbest) {
      fbest = f;
      th = t;
    }
  }

  std::vector<double> w(m);
  std::vector<double> wt(m);
  double d1 = 0.0;
  double d2 = 0.0;
  const double p = eval(th, &w, &wt, &d1, &d2);
  const double sgn = p >= 0.0 ? 1.0 : -1.0;
  const double f = std::abs(p);
  out.value = f * f;
  out.angle = th;
  for (std::size_t j = 0; j < m; ++j) out.grad[j] = 2.0 * f * sgn * w[j];
  if (want_hessian) {
    double scale = 0.0;
    for (double x : c) scale = std::max(scale, std::abs(x));
    if (f <= 1e-14 * scale || scale == 0.0) {
      // no preferred direction: average the rank-one forms over the circle
      for (int i = 0; i < samples; ++i) {
        std::vector<double> ws(m);
        eval(i * dth, &ws, nullptr, nullptr, nullptr);
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) out.hess[a * m + b] += 2.0 * ws[a] * ws[b] / samples;
      }
    } else {
      const double kappa = -sgn * d2;
      const double factor = kappa > f / 10.0 ? f / kappa : 10.0;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          out.hess[a * m + b] = 2.0 * w[a] * w[b] + 2.0 * factor * wt[a] * wt[b];
    }
  }
  return out;
}

}  // namespace phaseflow
