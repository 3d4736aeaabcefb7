#include <cmath>
#include <numbers>

#include "doctest.h"
#include "phaseflow/errors.hpp"
#include "phaseflow/profile1d.hpp"

using namespace phaseflow;

TEST_CASE("first-order profile reaches 8/3") {
  const auto m = estimate_m_k(1, Potential::quartic(), {2.0, 4.0, 8.0, 16.0}, 1e-4);
  CHECK_FALSE(m.unbounded);
  CHECK(m.converged);
  CHECK(m.m_hat == doctest::Approx(8.0 / 3.0).epsilon(1e-3));
  REQUIRE(m.table.size() == 4);
  CHECK(m.table.front().first == 2.0);
}

TEST_CASE("second-order m(T) decreases and settles") {
  const auto m = estimate_m_k(2, Potential::quartic(), {2.0, 4.0, 8.0, 16.0}, 1e-4, {}, default_profile_h(2));
  CHECK_FALSE(m.unbounded);
  CHECK(m.monotone);
  REQUIRE(m.table.size() == 4);
  for (std::size_t i = 1; i < m.table.size(); ++i) CHECK(m.table[i].second <= m.table[i - 1].second + 1e-6);
  CHECK(std::abs(m.table[3].second - m.table[2].second) < 1e-4);
  CHECK(m.m_hat > 2.0);
  CHECK(m.m_hat < 8.0 / 3.0);

  const auto& sol = m.solutions.back();
  CHECK(sol.status == ProfileStatus::Ok);
  // the linearization at the wells has complex roots, so the tails ring; they stay odd
  CHECK(derivative_sign_changes(sol.field) % 2 == 0);
  for (double t : {0.3, 1.1, 2.5, 6.0}) CHECK(sample_field(sol.field, -t) == doctest::Approx(-sample_field(sol.field, t)).epsilon(1e-6));
  const auto tails = tail_diagnostics(sol, 2);
  CHECK(tails.pass);
  REQUIRE(tails.max_abs.size() == 1);
  CHECK(tails.max_abs[0] < 1e-3);
  CHECK(sample_field(sol.field, -1e6) == doctest::Approx(-1.0));
  CHECK(sample_field(sol.field, 0.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("ramp initial data respects the bands") {
  ProfileProblem p;
  p.spec = FunctionalSpec::pure(2);
  p.T = 4.0;
  const auto f = ramp_init(p);
  CHECK(f.u.front() == -1.0);
  CHECK(f.u.back() == 1.0);
  CHECK(derivative_sign_changes(f) == 0);
  CHECK(p.band() >= 5 * p.h);
}

TEST_CASE("derivative sign changes on a wiggle") {
  Grid1D g{0.0, 1.0, 200};
  Field1D f = Field1D::constant(g, 0.0);
  for (std::size_t i = 0; i < g.nodes(); ++i) f.u[i] = std::sin(6.0 * std::numbers::pi * g.x(i));
  CHECK(derivative_sign_changes(f) == 6);
  for (auto& v : f.u) v *= 1e-12;
  CHECK(derivative_sign_changes(f) == 0);
}

TEST_CASE("tails fail when the solution has not flattened") {
  ProfileProblem p;
  p.spec = FunctionalSpec::pure(1);
  p.T = 8.0;
  ProfileSolution s;
  s.field = ramp_init(p, 20.0);
  const auto r = tail_diagnostics(s, 1);
  CHECK_FALSE(r.pass);
}

TEST_CASE("profile validation") {
  ProfileProblem p;
  p.spec = FunctionalSpec::pure(2);
  p.T = 0.4;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p.T = 4.0;
  p.h = 0.0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p.h = 0.01;
  p.spec.eps = 0.5;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  CHECK_THROWS_AS(estimate_m_k(2, Potential::quartic(), {4.0, 2.0, 8.0}, 1e-4), ArgumentError);
}

TEST_CASE("strongly negative first-order coefficient is flagged") {
  auto spec = FunctionalSpec::make(2, {-12.0, 1.0}, 1.0);
  ProfileProblem p;
  p.spec = spec;
  p.T = 4.0;
  p.h = default_profile_h(2);
  ProfileOptions o;
  o.multistart = false;
  const auto s = solve_profile(p, std::nullopt, o);
  CHECK(s.status == ProfileStatus::Unbounded);
  CHECK_FALSE(s.diagnostic.empty());
}
