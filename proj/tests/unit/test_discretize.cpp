#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "../support/fields.hpp"
#include "../support/gradcheck.hpp"
#include "doctest.h"
#include "phaseflow/discretize.hpp"
#include "phaseflow/errors.hpp"

using namespace phaseflow;
using phaseflow::testing::smooth_field;

using phaseflow::testing::coefficients;
using phaseflow::testing::fd_compare;
using phaseflow::testing::shipped_norms;

TEST_CASE("gradient matches finite differences in 1D for every order and norm") {
  std::mt19937_64 rng(101);
  for (int k = 1; k <= 4; ++k)
    for (const auto& [name, norm] : shipped_norms()) {
      const double tol = norm.kind == NormKind::Operatorial ? 1e-4 : 1e-5;
      double worst = 0.0;
      for (int field = 0; field < 20; ++field) {
        const double eps = std::uniform_real_distribution<double>(0.1, 0.5)(rng);
        const auto spec = FunctionalSpec::make(k, coefficients(k, rng), eps, norm);
        Grid1D g{-1.0, 1.0, 40};
        auto f = smooth_field(g, rng(), 0.9);
        f.mask[0] = f.mask.back() = NodeState::Fixed;
        worst = std::max(worst, fd_compare(f, spec, rng, 20).worst);
      }
      INFO("k = " << k << ", norm = " << name);
      CHECK(worst < tol);
    }
}

TEST_CASE("gradient matches finite differences in 2D for every order and norm") {
  std::mt19937_64 rng(202);
  for (int k = 1; k <= 4; ++k)
    for (const auto& [name, norm] : shipped_norms()) {
      const double tol = norm.kind == NormKind::Operatorial ? 1e-4 : 1e-5;
      double worst = 0.0;
      for (int field = 0; field < 20; ++field) {
        const double eps = std::uniform_real_distribution<double>(0.2, 0.6)(rng);
        const double angle = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
        const auto spec = FunctionalSpec::make(k, coefficients(k, rng), eps, norm);
        const auto g = Grid2D::rotated(angle, 12, 1.0, field % 2 == 0);
        auto f = smooth_field(g, rng(), 0.9);
        worst = std::max(worst, fd_compare(f, spec, rng, 20).worst);
      }
      INFO("k = " << k << ", norm = " << name);
      CHECK(worst < tol);
    }
}

TEST_CASE("energy of simple fields") {
  for (int k = 1; k <= 4; ++k) {
    const auto spec = FunctionalSpec::pure(k, 0.25);
    Grid1D g{-1.0, 1.0, 60};
    const auto one = Field1D::constant(g, 1.0);
    CHECK(assemble_energy(one, spec).total == doctest::Approx(0.0));
    for (double v : assemble_gradient(one, spec)) CHECK(v == doctest::Approx(0.0));
    const auto zero = Field1D::constant(g, 0.0);
    CHECK(assemble_energy(zero, spec).total == doctest::Approx(2.0 / 0.25));

    const auto g2 = Grid2D::rotated(0.3, 10);
    CHECK(assemble_energy(Field2D::constant(g2, -1.0), spec).total == doctest::Approx(0.0));
    CHECK(assemble_energy(Field2D::constant(g2, 0.0), spec).total == doctest::Approx(1.0 / 0.25));
  }
}

TEST_CASE("gradient respects the mirror symmetry of an even potential") {
  const auto spec = FunctionalSpec::make(2, {0.3, 1.0}, 0.2);
  Grid1D g{-1.0, 1.0, 50};
  Field1D f = Field1D::constant(g, 0.0);
  for (std::size_t i = 0; i < g.nodes(); ++i) f.u[i] = std::tanh(3.0 * g.x(i)) + 0.2 * std::sin(5.0 * g.x(i));
  const auto grad = assemble_gradient(f, spec);
  const std::size_t n = g.nodes();
  for (std::size_t i = 0; i < n; ++i) CHECK(grad[i] == doctest::Approx(-grad[n - 1 - i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("fixed nodes receive no gradient") {
  const auto spec = FunctionalSpec::pure(2, 0.3);
  Grid1D g{-1.0, 1.0, 30};
  auto f = smooth_field(g, 9);
  for (std::size_t i = 0; i < 5; ++i) f.mask[i] = NodeState::Fixed;
  const auto grad = assemble_gradient(f, spec);
  for (std::size_t i = 0; i < 5; ++i) CHECK(grad[i] == 0.0);
}

TEST_CASE("Hessian is symmetric and matches gradient differences for quadratic norms") {
  std::mt19937_64 rng(7);
  const auto spec = FunctionalSpec::make(3, {0.2, 0.4, 1.0}, 0.3, NormSpec::frobenius());
  const auto g = Grid2D::rotated(0.7, 8, 1.0, true);
  const auto f = smooth_field(g, 5);
  DiscreteFunctional df(g, spec);
  const auto H = df.hessian(f.u);
  const Eigen::MatrixXd dense(H);
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-8 * dense.cwiseAbs().maxCoeff());
  std::vector<double> gp(df.size()), gm(df.size());
  for (int probe = 0; probe < 10; ++probe) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, df.size() - 1)(rng);
    auto up = f.u, um = f.u;
    const double h = 1e-6;
    up[j] += h;
    um[j] -= h;
    df.gradient(up, gp);
    df.gradient(um, gm);
    for (std::size_t i = 0; i < df.size(); ++i)
      CHECK(dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            doctest::Approx((gp[i] - gm[i]) / (2 * h)).epsilon(1e-5).scale(dense.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("node-centered derivatives are exact on low-degree polynomials") {
  Grid1D g{-1.0, 1.0, 99};
  Field1D sq = Field1D::constant(g, 0.0), cube = sq;
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    const double t = g.x(i);
    sq.u[i] = t * t;
    cube.u[i] = t * t * t;
  }
  const auto d2 = derivative_1d(sq, 2);
  const auto d3 = derivative_1d(cube, 3);
  for (std::size_t i = 4; i + 4 < g.nodes(); ++i) {
    CHECK(std::abs(d2.u[i] - 2.0) < 1e-10);
    CHECK(std::abs(d3.u[i] - 6.0) < 1e-8);
  }
}

TEST_CASE("first derivative converges at second order") {
  auto err = [](std::size_t n) {
    Grid1D g{-1.0, 1.0, n};
    Field1D f = Field1D::constant(g, 0.0);
    for (std::size_t i = 0; i < g.nodes(); ++i) f.u[i] = std::sin(g.x(i));
    const auto d = derivative_1d(f, 1);
    double e = 0.0;
    for (std::size_t i = 2; i + 2 < g.nodes(); ++i) e = std::max(e, std::abs(d.u[i] - std::cos(g.x(i))));
    return e;
  };
  const double ratio = err(99) / err(199);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("planar gradient tensors of ramps and parabolas") {
  const double a = 0.4;
  const double nu[2] = {std::cos(a), std::sin(a)};
  const auto g = Grid2D::rotated(1.1, 16, 1.0, false);
  Field2D lin = Field2D::constant(g, 0.0), quad = lin;
  for (std::size_t j = 0; j < g.nt(); ++j)
    for (std::size_t i = 0; i < g.ns(); ++i) {
      const auto p = g.point(i, j);
      const double x = p[0] * nu[0] + p[1] * nu[1];
      lin.u[g.index(i, j)] = x;
      quad.u[g.index(i, j)] = 0.5 * x * x;
    }
  const auto t1 = grad_tensor_2d(lin, 1);
  const auto t2 = grad_tensor_2d(quad, 2);
  // index extension is clamped at non-periodic edges, so only interior nodes are exact
  const std::size_t m = 3;
  for (std::size_t j = m; j + m < g.nt(); ++j)
    for (std::size_t i = m; i + m < g.ns(); ++i) {
      const auto n = g.index(i, j);
      CHECK(std::abs(t1[n].c[0] - nu[0]) < 1e-10);
      CHECK(std::abs(t1[n].c[1] - nu[1]) < 1e-10);
      CHECK(std::abs(t2[n].c[0] - nu[0] * nu[0]) < 1e-8);
      CHECK(std::abs(t2[n].c[1] - nu[0] * nu[1]) < 1e-8);
      CHECK(std::abs(t2[n].c[2] - nu[1] * nu[1]) < 1e-8);
    }
}

TEST_CASE("mixed partial of a separable cubic converges") {
  auto err = [](std::size_t cells) {
    const auto g = Grid2D::rotated(std::numbers::pi / 2, cells, 1.0, false);
    Field2D f = Field2D::constant(g, 0.0);
    for (std::size_t j = 0; j < g.nt(); ++j)
      for (std::size_t i = 0; i < g.ns(); ++i) {
        const auto p = g.point(i, j);
        f.u[g.index(i, j)] = (p[0] * p[0] * p[0] + p[0]) * (p[1] * p[1] * p[1] - 2 * p[1]);
      }
    const auto t = grad_tensor_2d(f, 2);
    double e = 0.0;
    for (std::size_t j = 3; j + 3 < g.nt(); ++j)
      for (std::size_t i = 3; i + 3 < g.ns(); ++i) {
        const auto p = g.point(i, j);
        const double exact = (3 * p[0] * p[0] + 1) * (3 * p[1] * p[1] - 2);
        e = std::max(e, std::abs(t[g.index(i, j)].c[1] - exact));
      }
    return e;
  };
  const double e1 = err(16), e2 = err(32);
  CHECK(e2 < e1);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(FunctionalSpec::make(0, {}, 1.0), ArgumentError);
  CHECK_THROWS_AS(FunctionalSpec::make(2, {0.0, 2.0}, 1.0), ArgumentError);
  CHECK_THROWS_AS(FunctionalSpec::make(2, {0.0, 1.0}, -1.0), ArgumentError);
  const auto s = FunctionalSpec::make(2, {-0.3, 1.0}, 0.5).all_positive();
  CHECK(s.q == std::vector<double>{1.0, 1.0});
}
