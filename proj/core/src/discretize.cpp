#include "phaseflow/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseflow/errors.hpp"
#include "phaseflow/stencil.hpp"

namespace phaseflow {
namespace {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

std::size_t clamp_index(long i, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
}

std::size_t wrap_index(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

// Operator with rows located at `rows` positions; row r uses nodes r + first + j.
RowSparse line_operator(const Stencil& st, std::size_t rows, std::size_t nodes, double h, int ell) {
  std::vector<Triplet> trip;
  const double scale = std::pow(h, -ell);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < st.w.size(); ++j) {
      const long col = static_cast<long>(r) + st.first + static_cast<long>(j);
      trip.emplace_back(static_cast<int>(r), static_cast<int>(clamp_index(col, nodes)), st.w[j] * scale);
    }
  }
  RowSparse D(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nodes));
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

// Frame components of the ell-th derivative tensor on a 2D grid: component b
// has (ell - b) tangent derivatives and b normal derivatives.
std::vector<RowSparse> frame_operators(const Grid2D& g, int ell) {
  const std::size_t ns = g.ns();
  const std::size_t nt = g.nt();
  const double h = g.h();
  std::vector<RowSparse> out;
  for (int b = 0; b <= ell; ++b) {
    const int a = ell - b;
    Stencil ss;
    ss.w = {1.0};
    Stencil st = ss;
    if (a > 0) ss = centered_stencil(a);
    if (b > 0) st = centered_stencil(b);
    const double scale = std::pow(h, -ell);
    std::vector<Triplet> trip;
    trip.reserve(g.nodes() * ss.w.size() * st.w.size());
    for (std::size_t j = 0; j < nt; ++j) {
      for (std::size_t i = 0; i < ns; ++i) {
        const auto row = static_cast<int>(g.index(i, j));
        for (std::size_t q = 0; q < st.w.size(); ++q) {
          const std::size_t jj = clamp_index(static_cast<long>(j) + st.first + static_cast<long>(q), nt);
          for (std::size_t p = 0; p < ss.w.size(); ++p) {
            const long ii = static_cast<long>(i) + ss.first + static_cast<long>(p);
            const std::size_t ic = g.periodic_tangent ? wrap_index(ii, ns) : clamp_index(ii, ns);
            trip.emplace_back(row, static_cast<int>(g.index(ic, jj)), ss.w[p] * st.w[q] * scale);
          }
        }
      }
    }
    RowSparse D(static_cast<Eigen::Index>(g.nodes()), static_cast<Eigen::Index>(g.nodes()));
    D.setFromTriplets(trip.begin(), trip.end());
    out.push_back(std::move(D));
  }
  return out;
}

Eigen::Map<const Eigen::VectorXd> as_vec(std::span<const double> u) {
  return {u.data(), static_cast<Eigen::Index>(u.size())};
}

}  // namespace

FunctionalSpec FunctionalSpec::make(int k, std::vector<double> q, double eps, NormSpec norm, Potential w) {
  FunctionalSpec s;
  s.k = k;
  s.q = std::move(q);
  s.norms.assign(static_cast<std::size_t>(std::max(k, 0)), norm);
  s.eps = eps;
  s.potential = std::move(w);
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::pure(int k, double eps, NormSpec norm) {
  std::vector<double> q(static_cast<std::size_t>(std::max(k, 1)), 0.0);
  q.back() = 1.0;
  return make(k, std::move(q), eps, std::move(norm));
}

void FunctionalSpec::validate() const {
  if (k < 1 || k > 4) throw ArgumentError("functional: k must be in [1, 4], got " + std::to_string(k));
  if (q.size() != static_cast<std::size_t>(k)) throw ArgumentError("functional: need exactly k coefficients");
  if (norms.size() != static_cast<std::size_t>(k)) throw ArgumentError("functional: need one norm per order");
  if (q.back() != 1.0) throw ArgumentError("functional: the top coefficient q_k must equal 1");
  for (double x : q) {
    if (!std::isfinite(x)) throw ArgumentError("functional: non-finite coefficient");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ArgumentError("functional: eps must be positive");
}

FunctionalSpec FunctionalSpec::with_eps(double e) const {
  FunctionalSpec s = *this;
  s.eps = e;
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::all_positive() const {
  FunctionalSpec s = *this;
  std::fill(s.q.begin(), s.q.end(), 1.0);
  return s;
}

DiscreteFunctional::DiscreteFunctional(const Grid1D& grid, const FunctionalSpec& spec, StencilFamily family)
    : spec_(spec), nodes_(grid.nodes()), dim_(1), g1_(grid) {
  spec_.validate();
  const std::size_t N = nodes_;
  const double h = grid.h();
  if (grid.n < static_cast<std::size_t>(4 * spec_.k + 1)) {
    throw ArgumentError("grid too coarse for the stencils: need n >= 4k + 1");
  }
  node_w_.resize(N);
  for (std::size_t i = 0; i < N; ++i) node_w_[i] = grid.weight(i);
  for (int ell = 1; ell <= spec_.k; ++ell) {
    const double q = spec_.q[static_cast<std::size_t>(ell - 1)];
    if (q == 0.0) continue;
    Term t;
    t.ell = ell;
    t.coef = q * std::pow(spec_.eps, 2 * ell - 1);
    const std::vector<int> idx(static_cast<std::size_t>(ell), 0);
    t.lambda = {spec_.norms[static_cast<std::size_t>(ell - 1)].weight(idx)};
    const Stencil st = family == StencilFamily::Staggered ? compact_stencil(ell) : centered_stencil(ell);
    if (st.shift > 0.0) {
      t.D.push_back(line_operator(st, N - 1, N, h, ell));
      t.w.assign(N - 1, h);
    } else {
      t.D.push_back(line_operator(st, N, N, h, ell));
      t.w = node_w_;
    }
    terms_.push_back(std::move(t));
  }
  finish_terms();
}

DiscreteFunctional::DiscreteFunctional(const Grid2D& grid, const FunctionalSpec& spec)
    : spec_(spec), nodes_(grid.nodes()), dim_(2), g2_(grid) {
  spec_.validate();
  if (grid.cells < static_cast<std::size_t>(2 * spec_.k + 2)) {
    throw ArgumentError("grid too coarse for the stencils");
  }
  node_w_.resize(nodes_);
  for (std::size_t j = 0; j < grid.nt(); ++j)
    for (std::size_t i = 0; i < grid.ns(); ++i) node_w_[grid.index(i, j)] = grid.weight(i, j);
  const double f0[2] = {grid.tangent[0], grid.tangent[1]};
  const double f1[2] = {grid.normal[0], grid.normal[1]};
  for (int ell = 1; ell <= spec_.k; ++ell) {
    const double q = spec_.q[static_cast<std::size_t>(ell - 1)];
    if (q == 0.0) continue;
    const NormSpec& norm = spec_.norms[static_cast<std::size_t>(ell - 1)];
    Term t;
    t.ell = ell;
    t.coef = q * std::pow(spec_.eps, 2 * ell - 1);
    t.w = node_w_;
    auto frame = frame_operators(grid, ell);
    const auto& mult = multiplicities(2, ell);
    const auto& idx = multi_indices(2, ell);
    if (norm.rotation_invariant()) {
      t.D = std::move(frame);
      if (norm.kind == NormKind::Frobenius || ell == 1) {
        t.mode = Mode::Quadratic;
        t.lambda = mult;
      } else {
        t.mode = Mode::Operatorial;
      }
    } else {
      const auto M = basis_change_matrix(f0, f1, ell);
      const std::size_t m = frame.size();
      for (std::size_t b = 0; b < m; ++b) {
        RowSparse D(frame[0].rows(), frame[0].cols());
        for (std::size_t a = 0; a < m; ++a) {
          const double coef = M[b * m + a];
          if (std::abs(coef) > 1e-15) D += coef * frame[a];
        }
        D.prune(0.0);
        t.D.push_back(std::move(D));
      }
      if (norm.kind == NormKind::MaxComponent) {
        t.mode = Mode::MaxComponent;
      } else {
        t.mode = Mode::Quadratic;
        for (std::size_t b = 0; b < m; ++b) t.lambda.push_back(norm.weight(idx[b]) * mult[b]);
      }
    }
    terms_.push_back(std::move(t));
  }
  finish_terms();
}

void DiscreteFunctional::finish_terms() {
  for (auto& t : terms_) {
    if (t.mode != Mode::Quadratic) continue;
    Eigen::SparseMatrix<double> H(static_cast<Eigen::Index>(nodes_), static_cast<Eigen::Index>(nodes_));
    for (std::size_t b = 0; b < t.D.size(); ++b) {
      Eigen::VectorXd wd(static_cast<Eigen::Index>(t.w.size()));
      for (std::size_t r = 0; r < t.w.size(); ++r) wd[static_cast<Eigen::Index>(r)] = 2.0 * t.coef * t.lambda[b] * t.w[r];
      Eigen::SparseMatrix<double> Dc = t.D[b];
      H += Eigen::SparseMatrix<double>(Dc.transpose() * wd.asDiagonal() * Dc);
    }
    t.quad_hessian = std::move(H);
  }
}

std::string DiscreteFunctional::node_location(std::size_t i) const {
  std::ostringstream os;
  if (dim_ == 1) {
    os << "node " << i << " (t = " << g1_.x(i) << ")";
  } else {
    const std::size_t ii = i % g2_.ns();
    const std::size_t jj = i / g2_.ns();
    const auto p = g2_.point(ii, jj);
    os << "node (" << ii << ", " << jj << ") at (" << p[0] << ", " << p[1] << ")";
  }
  return os.str();
}

void DiscreteFunctional::check_finite(std::span<const double> u) const {
  if (u.size() != nodes_) throw ArgumentError("field size does not match the grid");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) throw NumericError("non-finite value at " + node_location(i));
  }
}

EnergyReport DiscreteFunctional::energy(std::span<const double> u) const {
  check_finite(u);
  EnergyReport rep;
  rep.per_order.assign(static_cast<std::size_t>(spec_.k), 0.0);
  double pot = 0.0;
  for (std::size_t i = 0; i < nodes_; ++i) pot += node_w_[i] * spec_.potential.value(u[i]);
  rep.potential = pot / spec_.eps;
  const auto x = as_vec(u);
  for (const auto& t : terms_) {
    std::vector<Eigen::VectorXd> c;
    for (const auto& D : t.D) c.push_back(D * x);
    const std::size_t R = t.w.size();
    double e = 0.0;
    if (t.mode == Mode::Quadratic) {
      for (std::size_t b = 0; b < c.size(); ++b) {
        double s = 0.0;
        for (std::size_t r = 0; r < R; ++r) s += t.w[r] * c[b][static_cast<Eigen::Index>(r)] * c[b][static_cast<Eigen::Index>(r)];
        e += t.lambda[b] * s;
      }
    } else if (t.mode == Mode::MaxComponent) {
      for (std::size_t r = 0; r < R; ++r) {
        double mx = 0.0;
        for (const auto& cb : c) mx = std::max(mx, cb[static_cast<Eigen::Index>(r)] * cb[static_cast<Eigen::Index>(r)]);
        e += t.w[r] * mx;
      }
    } else {
      std::vector<double> cr(c.size());
      for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t b = 0; b < c.size(); ++b) cr[b] = c[b][static_cast<Eigen::Index>(r)];
        e += t.w[r] * operatorial_sq_2d(cr, t.ell, false).value;
      }
    }
    rep.per_order[static_cast<std::size_t>(t.ell - 1)] = t.coef * e;
  }
  rep.total = rep.potential;
  for (double v : rep.per_order) rep.total += v;
  if (!std::isfinite(rep.total)) throw NumericError("energy overflowed to a non-finite value");
  return rep;
}

double DiscreteFunctional::gradient(std::span<const double> u, std::span<double> g) const {
  check_finite(u);
  if (g.size() != nodes_) throw ArgumentError("gradient buffer size does not match the grid");
  Eigen::Map<Eigen::VectorXd> G(g.data(), static_cast<Eigen::Index>(g.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < nodes_; ++i) {
    total += node_w_[i] * spec_.potential.value(u[i]) / spec_.eps;
    g[i] = node_w_[i] * spec_.potential.slope(u[i]) / spec_.eps;
  }
  const auto x = as_vec(u);
  for (const auto& t : terms_) {
    const std::size_t R = t.w.size();
    const std::size_t m = t.D.size();
    std::vector<Eigen::VectorXd> c;
    for (const auto& D : t.D) c.push_back(D * x);
    std::vector<Eigen::VectorXd> y(m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(R)));
    double e = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      if (t.mode == Mode::Quadratic) {
        for (std::size_t b = 0; b < m; ++b) {
          e += t.w[r] * t.lambda[b] * c[b][ri] * c[b][ri];
          y[b][ri] = 2.0 * t.coef * t.w[r] * t.lambda[b] * c[b][ri];
        }
      } else if (t.mode == Mode::MaxComponent) {
        std::size_t arg = 0;
        double mx = -1.0;
        for (std::size_t b = 0; b < m; ++b) {
          const double v = c[b][ri] * c[b][ri];
          if (v > mx) {
            mx = v;
            arg = b;
          }
        }
        e += t.w[r] * mx;
        y[arg][ri] = 2.0 * t.coef * t.w[r] * c[arg][ri];
      } else {
        std::vector<double> cr(m);
        for (std::size_t b = 0; b < m; ++b) cr[b] = c[b][ri];
        const auto op = operatorial_sq_2d(cr, t.ell, false);
        e += t.w[r] * op.value;
        for (std::size_t b = 0; b < m; ++b) y[b][ri] = t.coef * t.w[r] * op.grad[b];
      }
    }
    total += t.coef * e;
    for (std::size_t b = 0; b < m; ++b) G += t.D[b].transpose() * y[b];
  }
  return total;
}

Eigen::SparseMatrix<double> DiscreteFunctional::hessian(std::span<const double> u) const {
  check_finite(u);
  const auto N = static_cast<Eigen::Index>(nodes_);
  Eigen::SparseMatrix<double> H(N, N);
  {
    std::vector<Triplet> diag;
    diag.reserve(nodes_);
    for (std::size_t i = 0; i < nodes_; ++i) {
      diag.emplace_back(static_cast<int>(i), static_cast<int>(i),
                        node_w_[i] * spec_.potential.curvature(u[i]) / spec_.eps);
    }
    H.setFromTriplets(diag.begin(), diag.end());
  }
  const auto x = as_vec(u);
  for (const auto& t : terms_) {
    if (t.mode == Mode::Quadratic) {
      H += t.quad_hessian;
      continue;
    }
    const std::size_t R = t.w.size();
    const std::size_t m = t.D.size();
    std::vector<Eigen::VectorXd> c;
    for (const auto& D : t.D) c.push_back(D * x);
    // block-diagonal curvature per row, rows ordered component-major
    std::vector<Triplet> trip;
    trip.reserve(R * m * m);
    for (std::size_t r = 0; r < R; ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      if (t.mode == Mode::MaxComponent) {
        std::size_t arg = 0;
        double mx = -1.0;
        for (std::size_t b = 0; b < m; ++b) {
          const double v = c[b][ri] * c[b][ri];
          if (v > mx) {
            mx = v;
            arg = b;
          }
        }
        trip.emplace_back(static_cast<int>(arg * R + r), static_cast<int>(arg * R + r), 2.0 * t.coef * t.w[r]);
      } else {
        std::vector<double> cr(m);
        for (std::size_t b = 0; b < m; ++b) cr[b] = c[b][ri];
        const auto op = operatorial_sq_2d(cr, t.ell, true);
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) {
            const double v = t.coef * t.w[r] * op.hess[a * m + b];
            if (v != 0.0) trip.emplace_back(static_cast<int>(a * R + r), static_cast<int>(b * R + r), v);
          }
      }
    }
    const auto MR = static_cast<Eigen::Index>(m * R);
    Eigen::SparseMatrix<double> B(MR, MR);
    B.setFromTriplets(trip.begin(), trip.end());
    std::vector<Triplet> st;
    for (std::size_t b = 0; b < m; ++b) {
      for (Eigen::Index r = 0; r < t.D[b].outerSize(); ++r) {
        for (RowSparse::InnerIterator it(t.D[b], r); it; ++it) {
          st.emplace_back(static_cast<int>(b * R) + static_cast<int>(r), static_cast<int>(it.col()), it.value());
        }
      }
    }
    Eigen::SparseMatrix<double> S(MR, N);
    S.setFromTriplets(st.begin(), st.end());
    H += Eigen::SparseMatrix<double>(S.transpose() * B * S);
  }
  return H;
}

Field1D derivative_1d(const Field1D& f, int ell) {
  if (ell < 1) throw ArgumentError("derivative_1d: order must be positive");
  const Stencil st = centered_stencil(ell);
  const std::size_t N = f.grid.nodes();
  if (N < st.w.size()) throw ArgumentError("derivative_1d: grid too coarse for the stencil");
  const RowSparse D = line_operator(st, N, N, f.grid.h(), ell);
  Field1D out = f;
  const Eigen::VectorXd d = D * as_vec(f.u);
  for (std::size_t i = 0; i < N; ++i) out.u[i] = d[static_cast<Eigen::Index>(i)];
  return out;
}

std::vector<SymTensor> grad_tensor_2d(const Field2D& f, int ell, bool frame) {
  if (ell < 1 || ell > 8) throw ArgumentError("grad_tensor_2d: order out of range");
  if (f.grid.cells < static_cast<std::size_t>(ell + 2)) {
    throw ArgumentError("grad_tensor_2d: grid too coarse for the stencil");
  }
  const auto ops = frame_operators(f.grid, ell);
  std::vector<Eigen::VectorXd> c;
  for (const auto& D : ops) c.push_back(D * as_vec(f.u));
  const double f0[2] = {f.grid.tangent[0], f.grid.tangent[1]};
  const double f1[2] = {f.grid.normal[0], f.grid.normal[1]};
  std::vector<SymTensor> out(f.grid.nodes(), SymTensor::zero(2, ell));
  for (std::size_t n = 0; n < out.size(); ++n) {
    for (std::size_t b = 0; b < ops.size(); ++b) out[n].c[b] = c[b][static_cast<Eigen::Index>(n)];
    if (!frame) out[n] = rotate_tensor(out[n], f0, f1);
  }
  return out;
}

EnergyReport assemble_energy(const Field1D& f, const FunctionalSpec& spec) {
  return DiscreteFunctional(f.grid, spec).energy(f.u);
}

EnergyReport assemble_energy(const Field2D& f, const FunctionalSpec& spec) {
  return DiscreteFunctional(f.grid, spec).energy(f.u);
}

namespace {
template <typename F>
std::vector<double> masked_gradient(const F& f, const DiscreteFunctional& df) {
  std::vector<double> g(f.u.size());
  df.gradient(f.u, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (f.mask[i] == NodeState::Fixed) g[i] = 0.0;
  }
  return g;
}
}  // namespace

std::vector<double> assemble_gradient(const Field1D& f, const FunctionalSpec& spec) {
  return masked_gradient(f, DiscreteFunctional(f.grid, spec));
}

std::vector<double> assemble_gradient(const Field2D& f, const FunctionalSpec& spec) {
  return masked_gradient(f, DiscreteFunctional(f.grid, spec));
}

}  // namespace phaseflow
