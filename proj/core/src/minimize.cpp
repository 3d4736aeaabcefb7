#include "phaseflow/minimize.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace phaseflow {
namespace {

using Vec = Eigen::VectorXd;

struct Reduced {
  const DiscreteFunctional& f;
  std::vector<double> base;
  std::vector<std::size_t> free;
  std::vector<long> slot;  // node -> free position or -1
  mutable std::vector<double> full_grad;

  Reduced(const DiscreteFunctional& fn, const std::vector<double>& u0, const std::vector<NodeState>& mask)
      : f(fn), base(u0), slot(u0.size(), -1), full_grad(u0.size()) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i] == NodeState::Free) {
        slot[i] = static_cast<long>(free.size());
        free.push_back(i);
      }
    }
  }

  [[nodiscard]] Vec gather(const std::vector<double>& u) const {
    Vec x(static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) x[static_cast<Eigen::Index>(k)] = u[free[k]];
    return x;
  }
  std::vector<double> scatter(const Vec& x) const {
    std::vector<double> u = base;
    for (std::size_t k = 0; k < free.size(); ++k) u[free[k]] = x[static_cast<Eigen::Index>(k)];
    return u;
  }
  double value(const Vec& x) const { return f.value(scatter(x)); }
  double value_grad(const Vec& x, Vec& g) const {
    const double e = f.gradient(scatter(x), full_grad);
    g.resize(static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) g[static_cast<Eigen::Index>(k)] = full_grad[free[k]];
    return e;
  }
  Eigen::SparseMatrix<double> hessian(const Vec& x) const {
    const auto H = f.hessian(scatter(x));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(H.nonZeros()));
    for (Eigen::Index c = 0; c < H.outerSize(); ++c) {
      const long sc = slot[static_cast<std::size_t>(c)];
      if (sc < 0) continue;
      for (Eigen::SparseMatrix<double>::InnerIterator it(H, c); it; ++it) {
        const long sr = slot[static_cast<std::size_t>(it.row())];
        if (sr >= 0) trip.emplace_back(static_cast<int>(sr), static_cast<int>(sc), it.value());
      }
    }
    const auto n = static_cast<Eigen::Index>(free.size());
    Eigen::SparseMatrix<double> R(n, n);
    R.setFromTriplets(trip.begin(), trip.end());
    return R;
  }
};

double inf_norm(const Vec& g) { return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff(); }

double roundoff_floor(const Eigen::SparseMatrix<double>& H, const Vec& x, double factor) {
  Vec acc = Vec::Zero(x.size());
  for (Eigen::Index c = 0; c < H.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(H, c); it; ++it)
      acc[it.row()] += std::abs(it.value() * x[c]);
  return factor * std::numeric_limits<double>::epsilon() * (acc.size() ? acc.maxCoeff() : 0.0);
}

// twenty consecutive iterations without a representable energy decrease
bool no_progress(const std::vector<double>& h) {
  constexpr std::size_t window = 20;
  if (h.size() <= window) return false;
  const double a = h[h.size() - 1 - window];
  const double b = h.back();
  return a - b <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(b));
}

// below the floating-point floor and the last step no longer changes the energy
bool resolved(const MinimizeResult& res, double gtol) {
  if (res.grad_inf < gtol) return true;
  if (res.grad_inf >= res.gtol_effective || res.history.size() < 2) return false;
  const double a = res.history[res.history.size() - 2];
  const double b = res.history.back();
  return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b));
}

struct State {
  Vec x;
  Vec g;
  double e = 0.0;
};

// Backtracking Armijo search along d; returns false if no acceptable step.
bool line_search(const Reduced& r, State& s, const Vec& d, double alpha0, const MinimizeOptions& o) {
  const double slope = s.g.dot(d);
  if (!(slope < 0.0)) return false;
  double alpha = alpha0;
  for (int k = 0; k < 60; ++k) {
    Vec xt = s.x + alpha * d;
    double et;
    try {
      et = r.value(xt);
    } catch (const std::exception&) {
      et = std::numeric_limits<double>::infinity();
    }
    if (et <= s.e + 1e-4 * alpha * slope || et < o.unbounded_below) {
      s.x = std::move(xt);
      s.e = r.value_grad(s.x, s.g);
      return true;
    }
    alpha *= 0.5;
  }
  return false;
}

void run_lbfgs(const Reduced& r, State& s, const MinimizeOptions& o, MinimizeResult& res, std::size_t budget) {
  std::deque<Vec> S;
  std::deque<Vec> Y;
  std::size_t fails = 0;
  for (std::size_t it = 0; it < budget; ++it) {
    res.grad_inf = inf_norm(s.g);
    if (resolved(res, o.gtol)) {
      res.status = MinimizeStatus::Converged;
      return;
    }
    if (s.e < o.unbounded_below) {
      res.status = MinimizeStatus::Unbounded;
      return;
    }
    Vec q = -s.g;
    std::vector<double> alpha(S.size());
    for (std::size_t i = S.size(); i-- > 0;) {
      alpha[i] = S[i].dot(q) / Y[i].dot(S[i]);
      q -= alpha[i] * Y[i];
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = Y[i].dot(q) / Y[i].dot(S[i]);
      q += (alpha[i] - beta) * S[i];
    }
    if (!(s.g.dot(q) < 0.0)) {
      S.clear();
      Y.clear();
      q = -s.g;
    }
    double a0 = 1.0;
    if (S.empty()) a0 = std::min(1.0, 1.0 / std::max(1e-300, inf_norm(s.g)));
    const Vec xold = s.x;
    const Vec gold = s.g;
    if (!line_search(r, s, q, a0, o)) {
      if (S.empty() || ++fails > 2) {
        res.status = MinimizeStatus::Stalled;
        return;
      }
      S.clear();
      Y.clear();
      continue;
    }
    fails = 0;
    ++res.iterations;
    res.history.push_back(s.e);
    if (no_progress(res.history)) {
      res.grad_inf = inf_norm(s.g);
      res.status = MinimizeStatus::Stalled;
      return;
    }
    Vec sk = s.x - xold;
    Vec yk = s.g - gold;
    if (sk.dot(yk) > 1e-12 * sk.norm() * yk.norm()) {
      S.push_back(std::move(sk));
      Y.push_back(std::move(yk));
      if (S.size() > o.lbfgs_memory) {
        S.pop_front();
        Y.pop_front();
      }
    }
  }
  res.status = MinimizeStatus::MaxIterations;
}

void run_newton(const Reduced& r, State& s, const MinimizeOptions& o, MinimizeResult& res) {
  double mu = 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  const auto n = static_cast<Eigen::Index>(s.x.size());
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  while (res.iterations < o.max_iter) {
    res.grad_inf = inf_norm(s.g);
    if (resolved(res, o.gtol)) {
      res.status = MinimizeStatus::Converged;
      return;
    }
    if (s.e < o.unbounded_below) {
      res.status = MinimizeStatus::Unbounded;
      return;
    }
    const auto H = r.hessian(s.x);
    res.gtol_effective = std::max(o.gtol, roundoff_floor(H, s.x, o.roundoff_factor));
    if (resolved(res, o.gtol)) {
      res.status = MinimizeStatus::Converged;
      return;
    }
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(H.coeff(i, i)));
    scale = std::max(scale, 1e-12);
    bool stepped = false;
    for (int attempt = 0; attempt < 30 && !stepped; ++attempt) {
      ldlt.compute(H + mu * I);
      const bool pd = ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0;
      if (pd) {
        const Vec d = ldlt.solve(-s.g);
        if (d.allFinite() && line_search(r, s, d, 1.0, o)) {
          stepped = true;
          break;
        }
        // roundoff regime: accept the full step if it shrinks the gradient without raising the energy
        if (d.allFinite()) {
          Vec xt = s.x + d;
          Vec gt;
          const double et = r.value_grad(xt, gt);
          if (inf_norm(gt) < 0.5 * inf_norm(s.g) && et <= s.e + 1e-13 * (1.0 + std::abs(s.e))) {
            s.x = std::move(xt);
            s.g = std::move(gt);
            s.e = et;
            stepped = true;
            break;
          }
        }
      }
      mu = std::max(10.0 * mu, 1e-8 * scale);
      if (mu > 1e12 * scale) break;
    }
    if (!stepped) {
      const std::size_t before = res.iterations;
      run_lbfgs(r, s, o, res, std::min<std::size_t>(200, o.max_iter - res.iterations));
      if (res.status == MinimizeStatus::Converged || res.status == MinimizeStatus::Unbounded) return;
      if (res.iterations == before) {
        res.grad_inf = inf_norm(s.g);
        res.status = MinimizeStatus::Stalled;
        return;
      }
      mu = 1e-6 * scale;
      continue;
    }
    ++res.iterations;
    res.history.push_back(s.e);
    mu = mu < 1e-10 * scale ? 0.0 : mu * 0.1;
    if (no_progress(res.history)) {
      res.grad_inf = inf_norm(s.g);
      res.status = MinimizeStatus::Stalled;
      return;
    }
  }
  res.grad_inf = inf_norm(s.g);
  res.status = MinimizeStatus::MaxIterations;
}

}  // namespace

std::string to_string(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::Converged: return "converged";
    case MinimizeStatus::Stalled: return "stalled";
    case MinimizeStatus::MaxIterations: return "max_iterations";
    case MinimizeStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

MinimizeResult minimize(const DiscreteFunctional& f, const std::vector<double>& u0,
                        const std::vector<NodeState>& mask, const MinimizeOptions& opts) {
  Reduced r(f, u0, mask);
  State s;
  s.x = r.gather(u0);
  s.e = r.value_grad(s.x, s.g);
  MinimizeResult res;
  res.history.push_back(s.e);
  res.gtol_effective = opts.gtol;
  if (!r.free.empty()) {
    res.gtol_effective = std::max(opts.gtol, roundoff_floor(r.hessian(s.x), s.x, opts.roundoff_factor));
  }
  if (r.free.empty()) {
    res.status = MinimizeStatus::Converged;
  } else if (opts.method == MinimizerMethod::Newton) {
    run_newton(r, s, opts, res);
  } else {
    run_lbfgs(r, s, opts, res, opts.max_iter);
  }
  res.grad_inf = inf_norm(s.g);
  if (res.status == MinimizeStatus::Converged && res.grad_inf >= res.gtol_effective) {
    res.status = MinimizeStatus::Stalled;
  }
  res.u = r.scatter(s.x);
  res.energy = s.e;
  return res;
}

}  // namespace phaseflow
