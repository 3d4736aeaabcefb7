#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "phaseflow/errors.hpp"
#include "phaseflow/potential.hpp"

using namespace phaseflow;

namespace {

Potential sampled(double (*fn)(double), double lo, double hi, int n, Extrapolation ex = Extrapolation::None) {
  std::vector<double> s, w;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    s.push_back(x);
    w.push_back(fn(x));
  }
  return Potential::table(s, w, ex);
}

double quartic(double s) { return (1 - s * s) * (1 - s * s); }

}  // namespace

TEST_CASE("quartic values and slopes") {
  const auto w = Potential::quartic();
  CHECK(eval_potential(w, 1.0) == 0.0);
  CHECK(eval_potential(w, 0.0) == 1.0);
  CHECK(eval_potential(w, 2.0) == 9.0);
  CHECK(eval_potential_slope(w, 1.0) == 0.0);
  CHECK(eval_potential_slope(w, 0.0) == 0.0);
  CHECK(eval_potential_slope(w, 2.0) == doctest::Approx(24.0));
  CHECK(w.is_even());
  CHECK(w.describe() == "quartic");
}

TEST_CASE("slope and curvature agree with difference quotients") {
  const auto q = Potential::quartic();
  const auto t = sampled(quartic, -2.0, 2.0, 80);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pick(-1.9, 1.9);
  for (int i = 0; i < 50; ++i) {
    const double s = pick(rng), h = 1e-6;
    for (const auto* w : {&q, &t}) {
      CHECK(w->slope(s) == doctest::Approx((w->value(s + h) - w->value(s - h)) / (2 * h)).epsilon(1e-5));
    }
    CHECK(q.curvature(s) == doctest::Approx((q.slope(s + h) - q.slope(s - h)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("table potentials pin the wells and stay nonnegative") {
  // samples that miss the wells: knots at +-1 get inserted with value 0
  const auto w = Potential::table({-2.0, -0.5, 0.0, 0.5, 2.0}, {9.0, 0.5625, 1.0, 0.5625, 9.0});
  CHECK(w.value(-1.0) == 0.0);
  CHECK(w.value(1.0) == 0.0);
  for (double s = -2.0; s <= 2.0; s += 1e-3) CHECK(w.value(s) >= 0.0);
  CHECK(w.describe() == "table");
  CHECK(w.is_even());
  CHECK_FALSE(Potential::table({-2.0, 0.0, 2.0}, {9.0, 1.0, 8.0}).is_even());
}

TEST_CASE("table construction rejects bad data") {
  CHECK_THROWS_AS(Potential::table({-1.0, 1.0}, {0.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(Potential::table({-2.0, 0.0, 2.0}, {1.0, -1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(Potential::table({-0.5, 0.0, 2.0}, {1.0, 1.0, 1.0}), ArgumentError);
  // identically zero away from the wells
  CHECK_THROWS_AS(Potential::table({-2.0, -1.0, 0.0, 1.0, 2.0}, {0.0, 0.0, 0.0, 0.0, 0.0}), ArgumentError);
}

TEST_CASE("extrapolation policy outside the table") {
  const auto none = sampled(quartic, -1.5, 1.5, 30);
  CHECK_THROWS_AS((void)none.value(1.6), RangeError);
  CHECK_NOTHROW((void)none.value(1.5 + 1e-13));
  const auto lin = sampled(quartic, -1.5, 1.5, 30, Extrapolation::Linear);
  const double end = lin.value(1.5), slope = lin.slope(1.5);
  CHECK(lin.value(1.7) == doctest::Approx(end + 0.2 * slope));
}

TEST_CASE("CSV loading") {
  const auto dir = std::filesystem::temp_directory_path() / "phaseflow_potential_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "w.csv";
  {
    std::ofstream out(good);
    out << "# quartic samples\r\ns,w\r\n";
    for (int i = 0; i <= 40; ++i) {
      const double s = -2.0 + 0.1 * i;
      out << s << "," << quartic(s) << "\r\n";
    }
  }
  const auto w = Potential::load_csv(good);
  CHECK(w.value(0.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(w.value(0.35) == doctest::Approx(quartic(0.35)).epsilon(2e-2));

  const auto bad = dir / "bad.csv";
  {
    std::ofstream out(bad);
    out << "x,y\n0,1\n";
  }
  CHECK_THROWS(Potential::load_csv(bad));
  CHECK_THROWS_AS(Potential::load_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("hypothesis scan") {
  const auto grid = uniform_samples(-3.0, 3.0, 1e-2);
  CHECK(grid.front() == -3.0);
  CHECK(grid.back() == doctest::Approx(3.0));
  const auto rep = check_hypotheses(Potential::quartic(), grid);
  CHECK(rep.all_pass());
  CHECK(rep.resolution == doctest::Approx(1e-2));

  // (s^2 - 1)^2 / 100 is too flat for alpha = 1
  const auto flat = sampled([](double s) { return quartic(s) / 100.0; }, -3.0, 3.0, 600);
  const auto r2 = check_hypotheses(flat, grid);
  CHECK(r2.zeros_only_at_wells.pass);
  CHECK_FALSE(r2.quadratic_growth.pass);

  CHECK_THROWS_AS(check_hypotheses(Potential::quartic(), std::vector<double>{}), ArgumentError);
}
