#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phaseflow/discretize.hpp"
#include "phaseflow/interpolation.hpp"
#include "phaseflow/profile1d.hpp"
#include "phaseflow/tensor.hpp"

using namespace phaseflow;

namespace {

std::vector<double> random_components(int ell, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(ell + 1));
  for (double& v : c) v = n(rng);
  return c;
}

Field2D wavy(std::size_t cells) {
  const auto g = Grid2D::rotated(0.4, cells, 1.0, true);
  Field2D f = Field2D::constant(g, 0.0);
  for (std::size_t j = 0; j < g.nt(); ++j)
    for (std::size_t i = 0; i < g.ns(); ++i)
      f.u[g.index(i, j)] = std::tanh(4.0 * g.t(j)) + 0.1 * std::sin(2.0 * std::numbers::pi * g.s(i));
  return f;
}

}  // namespace

static void BM_OperatorialSq2D(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const auto c = random_components(ell, 7);
  for (auto _ : state) benchmark::DoNotOptimize(operatorial_sq_2d(c, ell, true).value);
}
BENCHMARK(BM_OperatorialSq2D)->DenseRange(1, 4);

static void BM_Energy2D(benchmark::State& state) {
  const auto f = wavy(static_cast<std::size_t>(state.range(0)));
  const auto spec = FunctionalSpec::make(2, {0.3, 1.0}, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_energy(f, spec).total);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.u.size()));
}
BENCHMARK(BM_Energy2D)->Arg(32)->Arg(64)->Arg(128);

static void BM_Gradient2D(benchmark::State& state) {
  const auto f = wavy(static_cast<std::size_t>(state.range(0)));
  const auto spec = FunctionalSpec::make(2, {0.3, 1.0}, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_gradient(f, spec).data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.u.size()));
}
BENCHMARK(BM_Gradient2D)->Arg(32)->Arg(64)->Arg(128);

static void BM_ProfileSolve(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  ProfileProblem p;
  p.spec = FunctionalSpec::pure(k);
  p.T = 8.0;
  p.h = default_profile_h(k);
  ProfileOptions o;
  o.multistart = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_profile(p, std::nullopt, o).energy);
}
BENCHMARK(BM_ProfileSolve)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_Threshold(benchmark::State& state) {
  ThresholdOptions o;
  o.budget = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(adversarial_threshold(1, 2, Potential::quartic(), CandidateFamily::Fourier, o).q_hat);
}
BENCHMARK(BM_Threshold)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
