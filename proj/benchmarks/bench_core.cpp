#include <benchmark/benchmark.h>

#include <random>

#include "declab/dynamics.hpp"
#include "declab/fprime.hpp"
#include "declab/metrics.hpp"
#include "declab/stable.hpp"

using namespace declab;

namespace {

StepPath random_walk(std::size_t jumps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> t, v{0.0};
  for (std::size_t k = 1; k <= jumps; ++k) {
    t.push_back(static_cast<double>(k) / static_cast<double>(jumps + 1));
    v.push_back(v.back() + g(rng));
  }
  return StepPath::scalar(t, v);
}

}  // namespace

static void BM_FrechetDP(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const StepPath a = random_walk(n, 1), b = random_walk(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(d_tildeD(a, b).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FrechetDP)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

static void BM_HausdorffGraphs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GraphSet a = completed_graph(random_walk(n, 3), Completion::Segment);
  const GraphSet b = completed_graph(random_walk(n, 4), Completion::Segment);
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b, 1e-3).value);
}
BENCHMARK(BM_HausdorffGraphs)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

// Shifted embedded Birkhoff paths: every point is near the maximum distance.
static void BM_DFprimeShift(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const InducedScheme s = InducedScheme::canonical(Doubling{}, 0.75);
  Rng rng = make_stream(5);
  const Orbit x = s.sample_mu(rng);
  Orbit tx = x;
  tx.step();
  const Decorated a = embed_step_trivial(wn_path(s, tx, n).path, n), b = embed_step_trivial(wn_path(s, x, n).path, n);
  for (auto _ : state) benchmark::DoNotOptimize(d_Fprime(a, b, 0.01 / static_cast<double>(n)).value);
}
BENCHMARK(BM_DFprimeShift)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_OrbitIteration(benchmark::State& state) {
  const MapSpec map = state.range(0) == 0 ? MapSpec{Doubling{}} : MapSpec{Tripling{}};
  Orbit o = make_orbit(map, 0.123456789);
  for (auto _ : state) {
    o.step();
    benchmark::DoNotOptimize(o.point());
  }
  state.SetLabel(map_name(map));
}
BENCHMARK(BM_OrbitIteration)->Arg(0)->Arg(1);

static void BM_InduceDoubling(benchmark::State& state) {
  const InducedScheme s = InducedScheme::canonical(Doubling{}, 0.75);
  Rng rng = make_stream(7);
  for (auto _ : state) benchmark::DoNotOptimize(induce(s, 1000, rng).size());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_InduceDoubling);

static void BM_SampleMarginal(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 100.0;
  const SpectralMeasure nu = SpectralMeasure::symmetric();
  Rng rng = make_stream(9);
  for (auto _ : state) benchmark::DoNotOptimize(sample_marginal(alpha, nu, rng));
}
BENCHMARK(BM_SampleMarginal)->Arg(50)->Arg(75)->Arg(150);

static void BM_SamplePath(benchmark::State& state) {
  const SpectralMeasure nu = SpectralMeasure::symmetric();
  Rng rng = make_stream(11);
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(1.5, nu, 1000, 64, rng).jumps.size());
}
BENCHMARK(BM_SamplePath)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
