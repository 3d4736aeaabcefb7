#include <cmath>
#include <vector>

#include "doctest.h"
#include "phaseflow/stencil.hpp"

using namespace phaseflow;

namespace {

// sum_j w_j p(first + j + shift offset) for p(x) = x^m, unit spacing, evaluated at x0 = 0
double apply(const Stencil& s, int m) {
  double v = 0.0;
  for (std::size_t j = 0; j < s.w.size(); ++j) v += s.w[j] * std::pow(s.first + static_cast<int>(j) - s.shift, m);
  return v;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("weights are exact on polynomials up to their degree") {
  for (int ell = 1; ell <= 8; ++ell) {
    for (const auto& s : {centered_stencil(ell), compact_stencil(ell)}) {
      // exact on x^m for m <= ell + 1 (second order): derivative of x^ell is ell!
      for (int m = 0; m <= ell + 1; ++m) {
        const double expect = m == ell ? factorial(ell) : 0.0;
        CHECK(apply(s, m) == doctest::Approx(expect).scale(factorial(ell)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("compact stencils are binomial differences") {
  const auto s = compact_stencil(3);
  REQUIRE(s.w.size() == 4);
  CHECK(s.shift == 0.5);
  const double expect[] = {-1.0, 3.0, -3.0, 1.0};
  for (int i = 0; i < 4; ++i) CHECK(s.w[static_cast<std::size_t>(i)] == doctest::Approx(expect[i]));
  CHECK(compact_stencil(2).shift == 0.0);
}

TEST_CASE("one-sided stencils stay inside the line") {
  for (int ell = 1; ell <= 4; ++ell) {
    const int count = 2 * ell + 6;
    for (int pos = 0; pos < count; ++pos) {
      const auto s = one_sided_stencil(ell, pos, count);
      CHECK(pos + s.first >= 0);
      CHECK(pos + s.last() < count);
      for (int m = 0; m <= ell + 1; ++m) {
        const double expect = m == ell ? factorial(ell) : 0.0;
        CHECK(apply(s, m) == doctest::Approx(expect).scale(factorial(ell)).epsilon(1e-8));
      }
    }
  }
}
