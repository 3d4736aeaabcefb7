#include <cmath>
#include <numbers>

#include "doctest.h"
#include "phaseflow/cell2d.hpp"
#include "phaseflow/errors.hpp"

using namespace phaseflow;

namespace {

CellOptions quick() {
  CellOptions o;
  o.perturbed_starts = 0;
  return o;
}

}  // namespace

TEST_CASE("first-order cell energy is close to 8/3 for any normal") {
  const auto spec = FunctionalSpec::pure(1);
  for (double angle : {0.5 * std::numbers::pi, 0.3}) {
    CellProblem p;
    p.angle = angle;
    p.eps = 0.1;
    p.spec = spec;
    const auto r = solve_cell(p, quick());
    CHECK(r.status == CellStatus::Ok);
    CHECK(r.energy == doctest::Approx(8.0 / 3.0).epsilon(0.05));
    CHECK(r.energy <= r.init_energy + 1e-12);
    CHECK(lateral_variation(r.solution) < 0.05);
    CHECK(potential_concentration(r, spec) > 0.5);
  }
}

TEST_CASE("admissible ramp is fixed on the bands and odd across the interface") {
  CellProblem p;
  p.spec = FunctionalSpec::pure(2);
  p.eps = 0.2;
  const auto f = boundary_field(p);
  const auto& g = f.grid;
  std::size_t fixed = 0;
  for (auto m : f.mask) fixed += m == NodeState::Fixed;
  CHECK(fixed > 0);
  CHECK(fixed < f.mask.size());
  for (std::size_t i = 0; i < g.ns(); ++i) {
    CHECK(f.u[g.index(i, 0)] == doctest::Approx(-1.0));
    CHECK(f.u[g.index(i, g.nt() - 1)] == doctest::Approx(1.0));
  }
  CHECK(p.band() >= 2 * 2 * g.h());
}

TEST_CASE("cell resolution rules") {
  CellProblem p;
  p.spec = FunctionalSpec::pure(2);
  p.eps = 0.1;
  CHECK(p.resolved_cells() == 60);
  p.cells = 20;
  CHECK_THROWS_AS(solve_cell(p, quick()), ArgumentError);
  CellOptions tight = quick();
  tight.max_cells = 40;
  CHECK_THROWS_AS(estimate_g(0.5 * std::numbers::pi, p.spec, {0.2, 0.05}, 1e-2, tight), ResolutionError);
}

TEST_CASE("lateral variation of a tilted field") {
  CellProblem p;
  p.spec = FunctionalSpec::pure(1);
  p.eps = 0.2;
  auto f = boundary_field(p);
  CHECK(lateral_variation(f) < 1e-12);
  const auto& g = f.grid;
  for (std::size_t j = 0; j < g.nt(); ++j)
    for (std::size_t i = 0; i < g.ns(); ++i) f.u[g.index(i, j)] += 0.01 * std::sin(2.0 * std::numbers::pi * i / g.ns());
  CHECK(lateral_variation(f) > 0.015);
}

TEST_CASE("positivity check") {
  CHECK_THROWS_AS(positivity_check({}, 1e-2), ArgumentError);
  GEstimate a, b;
  a.angle = 0.0;
  a.g_hat = 2.1;
  b.angle = 1.0;
  b.g_hat = 2.0;
  auto rep = positivity_check({a, b}, 1e-2);
  CHECK(rep.pass);
  CHECK(rep.min_g == doctest::Approx(2.0));
  b.unbounded = true;
  rep = positivity_check({a, b}, 1e-2);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.offending_angles.size() == 1);
  CHECK(rep.offending_angles[0] == 1.0);
  b.unbounded = false;
  b.g_hat = 0.05;
  CHECK_FALSE(positivity_check({a, b}, 1e-2).pass);

  const auto polar = polar_table({a, b});
  REQUIRE(polar.size() == 2);
  CHECK(polar[1].first == 1.0);
}

TEST_CASE("continuation over eps with an isotropic norm") {
  const auto spec = FunctionalSpec::pure(1);
  const auto g = estimate_g(0.5 * std::numbers::pi, spec, {0.2, 0.1}, 5e-2, quick());
  REQUIRE(g.table.size() == 2);
  CHECK_FALSE(g.unbounded);
  CHECK(g.g_hat == g.table.back().second);
  CHECK(g.g_hat == doctest::Approx(8.0 / 3.0).epsilon(0.05));
}

TEST_CASE("tangent orientation does not change the cell energy") {
  const auto b = basis_independence_check(0.7, FunctionalSpec::pure(1), 0.2, quick());
  CHECK(b.pass);
  CHECK(b.spread < 1e-3 * std::max(b.g_plus, 1.0));
}
