#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "phaseflow/errors.hpp"
#include "phaseflow/tensor.hpp"

using namespace phaseflow;

namespace {

SymTensor random_tensor(int d, int ell, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  auto t = SymTensor::zero(d, ell);
  for (double& c : t.c) c = n(rng);
  return t;
}

}  // namespace

TEST_CASE("storage layout") {
  for (int ell = 1; ell <= 8; ++ell) CHECK(component_count(2, ell) == static_cast<std::size_t>(ell + 1));
  CHECK(component_count(3, 2) == 6);
  CHECK(component_count(3, 3) == 10);
  for (int d = 1; d <= 3; ++d)
    for (int ell = 1; ell <= 4; ++ell) {
      double total = 0.0;
      for (double m : multiplicities(d, ell)) total += m;
      CHECK(total == doctest::Approx(std::pow(d, ell)));
    }
  const int unsorted[] = {1, 0, 1};
  const int sorted[] = {0, 1, 1};
  CHECK(component_position(2, unsorted) == component_position(2, sorted));
  CHECK(index_label(sorted) == "122");
}

TEST_CASE("contraction with a direction") {
  const double e1[] = {1.0, 0.0};
  const double diag[] = {1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2};
  const double minus_e2[] = {0.0, -1.0};
  CHECK(apply_direction(SymTensor::unit(2, {0, 0}), e1) == doctest::Approx(1.0));
  CHECK(apply_direction(SymTensor::unit(2, {0, 1}), diag) == doctest::Approx(1.0));
  CHECK(apply_direction(SymTensor::unit(2, {1, 1, 1}), minus_e2) == doctest::Approx(-1.0));
  const double long_xi[] = {1.0, 1.0};
  CHECK_THROWS_AS(apply_direction(SymTensor::unit(2, {0, 0}), long_xi), ArgumentError);
  const double three[] = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(apply_direction(SymTensor::unit(2, {0, 0}), three), ArgumentError);
}

TEST_CASE("form gradient and component weights match difference quotients") {
  std::mt19937_64 rng(17);
  for (int d = 2; d <= 3; ++d)
    for (int ell = 1; ell <= 4; ++ell) {
      const auto t = random_tensor(d, ell, rng);
      std::vector<double> xi(static_cast<std::size_t>(d));
      for (double& v : xi) v = std::normal_distribution<double>(0.0, 1.0)(rng);
      const auto g = form_gradient(t, xi);
      const double h = 1e-6;
      for (int i = 0; i < d; ++i) {
        auto p = xi, m = xi;
        p[static_cast<std::size_t>(i)] += h;
        m[static_cast<std::size_t>(i)] -= h;
        CHECK(g[static_cast<std::size_t>(i)] ==
              doctest::Approx((eval_form(t, p) - eval_form(t, m)) / (2 * h)).epsilon(1e-6));
      }
      // the form is linear in the components
      const auto w = form_component_weights(d, ell, xi);
      double sum = 0.0;
      for (std::size_t c = 0; c < t.size(); ++c) sum += w[c] * t.c[c];
      CHECK(sum == doctest::Approx(eval_form(t, xi)));
    }
}

TEST_CASE("norm values") {
  SymTensor diag = SymTensor::zero(2, 2);
  diag.c = {1.0, 0.0, -1.0};
  CHECK(operatorial_norm(diag).value == doctest::Approx(1.0));
  CHECK(operatorial_norm(SymTensor::unit(2, {0, 1})).value == doctest::Approx(1.0));
  SymTensor vec = SymTensor::zero(2, 1);
  vec.c = {3.0, 4.0};
  CHECK(operatorial_norm(vec).value == doctest::Approx(5.0));

  CHECK(norm_value(SymTensor::unit(2, {0, 1}), NormSpec::frobenius()) == doctest::Approx(std::numbers::sqrt2));
  SymTensor d13 = SymTensor::zero(2, 2);
  d13.c = {1.0, 0.0, -3.0};
  CHECK(norm_value(d13, NormSpec::max_component()) == doctest::Approx(3.0));
  CHECK(norm_value(SymTensor::zero(2, 3), NormSpec::operatorial()) == 0.0);

  auto w = NormSpec::weighted({{"12", 4.0}});
  // weight 4 on the mixed slot, counted twice
  CHECK(norm_value(SymTensor::unit(2, {0, 1}), w) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("norm tokens round-trip") {
  for (const char* tok : {"operatorial", "frobenius", "maxcomp"}) CHECK(norm_token(parse_norm_token(tok)) == tok);
  CHECK_THROWS_AS(parse_norm_token("spectral"), ArgumentError);
  CHECK_THROWS(parse_norm_token("wfrob:/definitely/not/here.csv"));
}

TEST_CASE("equivalence constants") {
  const auto same = equivalence_constants(NormSpec::frobenius(), NormSpec::frobenius(), 2, 2, 200);
  CHECK(same.c_low == doctest::Approx(1.0));
  CHECK(same.c_high == doctest::Approx(1.0));
  const auto mf = equivalence_constants(NormSpec::max_component(), NormSpec::frobenius(), 2, 1, 1000);
  CHECK(mf.c_low == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(0.02));
  CHECK(mf.c_high == doctest::Approx(1.0).epsilon(0.02));
  const auto of = equivalence_constants(NormSpec::operatorial(), NormSpec::frobenius(), 2, 2, 1000);
  CHECK(of.c_low == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(0.02));
  CHECK(of.c_high == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("fast planar operatorial norm agrees with sphere ascent") {
  std::mt19937_64 rng(23);
  for (int ell = 1; ell <= 6; ++ell)
    for (int trial = 0; trial < 20; ++trial) {
      const auto t = random_tensor(2, ell, rng);
      const auto fast = operatorial_sq_2d(t.c, ell, false);
      const double slow = operatorial_norm(t, 32).value;
      CHECK(std::sqrt(fast.value) == doctest::Approx(slow).epsilon(1e-8));
    }
}

TEST_CASE("planar operatorial gradient and curvature model") {
  std::mt19937_64 rng(29);
  for (int ell = 1; ell <= 4; ++ell)
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = random_tensor(2, ell, rng);
      const auto r = operatorial_sq_2d(t.c, ell, true);
      const double h = 1e-7;
      for (std::size_t c = 0; c < t.size(); ++c) {
        auto p = t.c, m = t.c;
        p[c] += h;
        m[c] -= h;
        const double fd = (operatorial_sq_2d(p, ell, false).value - operatorial_sq_2d(m, ell, false).value) / (2 * h);
        CHECK(r.grad[c] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
      // positive semidefinite: v' H v >= 0 for random v
      const std::size_t m = t.size();
      for (int probe = 0; probe < 5; ++probe) {
        std::vector<double> v(m);
        for (double& x : v) x = std::normal_distribution<double>(0.0, 1.0)(rng);
        double q = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) q += v[i] * r.hess[i * m + j] * v[j];
        CHECK(q >= -1e-10);
      }
    }
}

TEST_CASE("rotations preserve the invariant norms") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int ell = 1; ell <= 4; ++ell)
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = random_tensor(2, ell, rng);
      const double a = angle(rng);
      const double e0[2] = {std::cos(a), std::sin(a)};
      const double e1[2] = {-std::sin(a), std::cos(a)};
      const auto r = rotate_tensor(t, e0, e1);
      for (const auto& n : {NormSpec::operatorial(), NormSpec::frobenius()}) {
        CHECK(n.rotation_invariant());
        CHECK(norm_value(r, n) == doctest::Approx(norm_value(t, n)).epsilon(1e-8));
      }
      // the form is basis-free: T(xi) in the frame equals R(T)(frame xi)
      const double xi[2] = {0.6, 0.8};
      const double amb[2] = {xi[0] * e0[0] + xi[1] * e1[0], xi[0] * e0[1] + xi[1] * e1[1]};
      CHECK(eval_form(r, amb) == doctest::Approx(eval_form(t, xi)).epsilon(1e-10));
    }
  CHECK_FALSE(NormSpec::max_component().rotation_invariant());
}
