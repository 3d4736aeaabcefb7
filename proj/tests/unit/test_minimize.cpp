#include <cmath>

#include "doctest.h"
#include "phaseflow/minimize.hpp"

using namespace phaseflow;

namespace {

Field1D clamped_step(const Grid1D& g, double band) {
  Field1D f = Field1D::constant(g, 0.0);
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    const double x = g.x(i);
    f.u[i] = x < 0 ? -1.0 : 1.0;
    if (std::abs(x) > g.b - band) f.mask[i] = NodeState::Fixed;
  }
  return f;
}

}  // namespace

TEST_CASE("both methods reach the tanh energy for k = 1") {
  const auto spec = FunctionalSpec::pure(1, 1.0);
  Grid1D g{-8.0, 8.0, 1599};
  const auto f = clamped_step(g, 0.5);
  const DiscreteFunctional df(g, spec);
  for (auto method : {MinimizerMethod::Newton, MinimizerMethod::LBFGS}) {
    MinimizeOptions o;
    o.method = method;
    const auto r = minimize(df, f.u, f.mask, o);
    CHECK(r.converged(o));
    CHECK(r.energy == doctest::Approx(8.0 / 3.0).epsilon(1e-3));
    CHECK(r.energy <= df.value(f.u));
  }
}

TEST_CASE("minimization never raises the energy of the start") {
  for (int k = 1; k <= 3; ++k) {
    const auto spec = FunctionalSpec::make(k, std::vector<double>(static_cast<std::size_t>(k), 1.0), 1.0);
    Grid1D g{-4.0, 4.0, 399};
    const auto f = clamped_step(g, 0.5);
    const DiscreteFunctional df(g, spec);
    const auto r = minimize(df, f.u, f.mask);
    CHECK(r.energy <= df.value(f.u));
    for (std::size_t i = 0; i < f.u.size(); ++i)
      if (f.mask[i] == NodeState::Fixed) CHECK(r.u[i] == f.u[i]);
  }
}

TEST_CASE("energies below the threshold are reported as unbounded") {
  const auto spec = FunctionalSpec::make(2, {-12.0, 1.0}, 1.0);
  Grid1D g{-20.0, 20.0, 399};
  Field1D f = Field1D::constant(g, 1.0);
  for (std::size_t i = 0; i < g.nodes(); ++i) f.u[i] = 1.0 + 0.3 * std::sin(2.4 * g.x(i));
  f.mask.front() = f.mask.back() = NodeState::Fixed;
  const DiscreteFunctional df(g, spec);
  MinimizeOptions o;
  o.unbounded_below = -10.0;
  const auto r = minimize(df, f.u, f.mask, o);
  CHECK(r.status == MinimizeStatus::Unbounded);
  CHECK(r.energy < -10.0);
}

TEST_CASE("status names") {
  CHECK(to_string(MinimizeStatus::Converged) == "converged");
  CHECK(to_string(MinimizeStatus::Unbounded) == "unbounded");
}
