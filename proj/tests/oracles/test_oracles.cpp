// Reference values computed here from closed forms or independent quadrature,
// then compared with the library.

#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "phaseflow/boundary_profile.hpp"
#include "phaseflow/discretize.hpp"
#include "phaseflow/gamma.hpp"
#include "phaseflow/profile1d.hpp"
#include "phaseflow/stencil.hpp"
#include "phaseflow/tensor.hpp"

using namespace phaseflow;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("surface tension of the quartic well from the co-area identity") {
  // m_1 = 2 * int_{-1}^{1} sqrt(W(s)) ds
  const double oracle = 2.0 * simpson([](double s) { return 1.0 - s * s; }, -1.0, 1.0);
  CHECK(oracle == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

  const auto m = estimate_m_k(1, Potential::quartic(), {2.0, 4.0, 8.0, 16.0}, 1e-4);
  CHECK(std::abs(m.m_hat - oracle) < 1e-3);
  CHECK(m.monotone);
}

TEST_CASE("energy of the tanh profile matches the equipartition value") {
  const double eps = 0.05;
  const std::size_t n = 2000;
  Grid1D g{-10.0 * eps, 10.0 * eps, n};
  Field1D f = Field1D::constant(g, 0.0);
  for (std::size_t i = 0; i < g.nodes(); ++i) f.u[i] = std::tanh(g.x(i) / eps);
  const auto spec = FunctionalSpec::make(1, {1.0}, eps);
  // int (W(tanh) + sech^4) over (-10, 10) in rescaled units
  const double oracle = 2.0 * simpson([](double y) { return std::pow(1.0 / std::cosh(y), 4); }, -10.0, 10.0);
  CHECK(assemble_energy(f, spec).total == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(oracle == doctest::Approx(8.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("finite-difference weights reproduce textbook stencils") {
  const double x3[] = {-1.0, 0.0, 1.0};
  const auto d1 = fornberg_weights(0.0, x3, 1);
  const auto d2 = fornberg_weights(0.0, x3, 2);
  CHECK(d1[0] == doctest::Approx(-0.5));
  CHECK(d1[1] == doctest::Approx(0.0));
  CHECK(d1[2] == doctest::Approx(0.5));
  CHECK(d2[0] == doctest::Approx(1.0));
  CHECK(d2[1] == doctest::Approx(-2.0));
  CHECK(d2[2] == doctest::Approx(1.0));

  const double x5[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto d4 = fornberg_weights(0.0, x5, 4);
  const double binomial[] = {1.0, -4.0, 6.0, -4.0, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(d4[i] == doctest::Approx(binomial[i]));
}

TEST_CASE("operatorial norms from eigenvalues") {
  // symmetric 2x2 matrix [[a, b], [b, c]]: largest |eigenvalue|
  const double a = 0.3, b = -1.1, c = 2.0;
  const double mean = 0.5 * (a + c), rad = std::hypot(0.5 * (a - c), b);
  const double oracle = std::max(std::abs(mean + rad), std::abs(mean - rad));
  SymTensor t = SymTensor::zero(2, 2);
  t.c = {a, b, c};
  CHECK(operatorial_norm(t).value == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(std::sqrt(operatorial_sq_2d(t.c, 2, false).value) == doctest::Approx(oracle).epsilon(1e-9));

  // rank one v (x) v (x) v: |v|^3
  const double v[2] = {0.6, -1.7};
  SymTensor r = SymTensor::zero(2, 3);
  for (std::size_t i = 0; i < r.size(); ++i) {
    double p = 1.0;
    for (int idx : multi_indices(2, 3)[i]) p *= v[idx];
    r.c[i] = p;
  }
  CHECK(operatorial_norm(r).value == doctest::Approx(std::pow(std::hypot(v[0], v[1]), 3)).epsilon(1e-9));
}

TEST_CASE("boundary ramp has the closed-form endpoints and slopes") {
  // k = 1: slope 8 on [-1/8, 1/8]; k = 2: u = (3 * 8t - (8t)^3) / 2
  const auto r1 = BoundaryProfile::build(1);
  CHECK(r1.derivative(0.0, 1) == doctest::Approx(8.0));
  const auto r2 = BoundaryProfile::build(2);
  for (double t : {-0.1, -0.03, 0.0, 0.07}) {
    const double y = 8.0 * t;
    CHECK(r2.value(t) == doctest::Approx(0.5 * (3.0 * y - y * y * y)));
  }
  for (int k = 1; k <= 4; ++k) {
    const auto r = BoundaryProfile::build(k);
    CHECK(r.value(0.125) == doctest::Approx(1.0));
    CHECK(r.value(-0.125) == doctest::Approx(-1.0));
    for (int j = 1; j < k; ++j) CHECK(std::abs(r.derivative(0.125, j)) < 1e-9);
  }
}

TEST_CASE("L2 distance of the tanh family to the sign function") {
  // ||tanh(x/eps) - sgn||^2 = 2 eps int_0^inf (1 - tanh y)^2 dy = 2 eps (2 ln 2 - 1)
  const double integral = simpson([](double y) { return std::pow(1.0 - std::tanh(y), 2); }, 0.0, 40.0);
  CHECK(integral == doctest::Approx(2.0 * std::numbers::ln2 - 1.0).epsilon(1e-9));

  const double eps = 0.01;
  Grid1D g{-1.0, 1.0, 7999};
  Field1D f = Field1D::constant(g, 0.0);
  for (std::size_t i = 0; i < g.nodes(); ++i) f.u[i] = std::tanh(g.x(i) / eps);
  CHECK(l2_to_sign(f) == doctest::Approx(std::sqrt(2.0 * eps * integral)).epsilon(1e-3));
}
