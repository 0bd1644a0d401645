#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/ds_measure.hpp"
#include "corrdyn/paths.hpp"
#include "corrdyn/pressure.hpp"
#include "corrdyn/roots.hpp"
#include "corrdyn/ruelle.hpp"

using namespace corrdyn;

namespace {

const char* kPair = "1\n0 0 1 0\n1 0 1 0\n0 1 -1 0\n1\n1 0 2 0\n0 1 -1 0\n";
const char* kZ2 = "1\n2 0 1 0\n0 1 -1 0\n";
const char* kZ2Z3 = "1\n2 0 1 0\n0 1 -1 0\n1\n3 0 1 0\n0 1 -1 0\n";

CellSet circle_band(const SphereGrid& g) {
  CellSet band;
  for (int s = 0; s < g.n_sectors(); ++s) band.push_back(g.index(g.n_bands() / 2, s));
  return band;
}

}  // namespace

static void BM_Roots(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<cplx> c(state.range(0) + 1);
  for (auto& v : c) v = {g(rng), g(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(roots(c));
}
BENCHMARK(BM_Roots)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

static void BM_BackwardImages(benchmark::State& state) {
  const auto c = Correspondence::parse(kZ2Z3);
  const auto y = SpherePoint::from_complex({0.3, 0.8});
  for (auto _ : state) benchmark::DoNotOptimize(c.backward_images(y));
}
BENCHMARK(BM_BackwardImages);

static void BM_ForwardPaths(benchmark::State& state) {
  const auto c = Correspondence::parse(kPair);
  const auto x = SpherePoint::from_complex(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_forward_paths(c, x, static_cast<int>(state.range(0)), 1 << 16));
}
BENCHMARK(BM_ForwardPaths)->DenseRange(4, 10, 2);

static void BM_SeparatedSelection(benchmark::State& state) {
  const auto c = Correspondence::parse(kZ2);
  std::vector<ForwardPath> paths;
  const int n = static_cast<int>(state.range(0));
  for (int k = 0; k < n; ++k) {
    const auto z = std::polar(1.0, 2 * std::numbers::pi * k / n);
    paths.push_back(enumerate_forward_paths(c, SpherePoint::from_complex(z), 8, 4).paths.front());
  }
  const std::vector<double> w(paths.size(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(separated_indices(paths, 0.05, w));
}
BENCHMARK(BM_SeparatedSelection)->Arg(1 << 12)->Arg(1 << 15);

static void BM_EntropyPair(benchmark::State& state) {
  const auto c = Correspondence::parse(kPair);
  const std::vector<ScheduleEntry> schedule{{4, 0.1}, {6, 0.05}, {8, 0.05}};
  for (auto _ : state) benchmark::DoNotOptimize(entropy_estimate(c, schedule, 200, 1));
}
BENCHMARK(BM_EntropyPair)->Unit(benchmark::kMillisecond);

static void BM_Pullback(benchmark::State& state) {
  const auto c = Correspondence::parse(kZ2);
  const SphereGrid g(33, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pullback_iterate(c, g, SpherePoint::from_complex({0.5, 0.3}), 12, 8192, 1));
  }
}
BENCHMARK(BM_Pullback)->Unit(benchmark::kMillisecond);

static void BM_PowerIteration(benchmark::State& state) {
  const auto c = Correspondence::parse(kZ2);
  const SphereGrid g(33, 64);
  const RuelleOperator op(c, g, circle_band(g));
  const auto f = op.sample(SphereFunction::parse("re"));
  for (auto _ : state) benchmark::DoNotOptimize(power_iteration(op, f, 1e-12, 100000, 1));
}
BENCHMARK(BM_PowerIteration)->Unit(benchmark::kMillisecond);

static void BM_OperatorBuild(benchmark::State& state) {
  const auto c = Correspondence::parse(kZ2Z3);
  const SphereGrid g(33, 64);
  for (auto _ : state) benchmark::DoNotOptimize(RuelleOperator(c, g, circle_band(g)));
}
BENCHMARK(BM_OperatorBuild)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
