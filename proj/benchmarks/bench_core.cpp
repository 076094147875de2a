#include "orbitdep/experiments.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace orbitdep;

namespace {

Endomorphism squaring() {
  return Endomorphism({HomogeneousForm(2, {{{2, 0}, Integer(1)}}), HomogeneousForm(2, {{{0, 2}, Integer(1)}})}, "f");
}

std::vector<ProjectivePoint> sample_points(std::size_t n, long bound, std::size_t count) {
  SplitMix64 rng(1);
  std::vector<ProjectivePoint> out;
  while (out.size() < count) {
    std::vector<Integer> c;
    for (std::size_t i = 0; i <= n; ++i) c.emplace_back(rng.uniform(-bound, bound));
    if (std::all_of(c.begin(), c.end(), [](const Integer& x) { return x == 0; })) continue;
    out.push_back(ProjectivePoint::normalize(std::span<const Integer>(c)));
  }
  return out;
}

void BM_Factor(benchmark::State& state) {
  SplitMix64 rng(2);
  std::vector<Integer> values;
  for (int i = 0; i < 64; ++i) {
    Integer v = rng.uniform(1, 1'000'000'000L);
    v *= rng.uniform(1, 1'000'000'000L);
    values.push_back(v);
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(factor(values[i++ % values.size()]));
}
BENCHMARK(BM_Factor);

void BM_LocalHeights(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i <= n; ++i) idx.push_back(i);
  const auto d = Divisor::coordinate_product(n, idx);
  auto pts = sample_points(n, 1'000'000, 256);
  std::erase_if(pts, [&](const ProjectivePoint& p) { return d.contains(p); });
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(all_local_heights(d, pts[i++ % pts.size()]));
}
BENCHMARK(BM_LocalHeights)->Arg(1)->Arg(3);

void BM_SmithNormalForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(3);
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-50, 50);
  }
  for (auto _ : state) benchmark::DoNotOptimize(smith_normal_form(m));
}
BENCHMARK(BM_SmithNormalForm)->Arg(6)->Arg(12)->Arg(20);

void BM_SolveDependence(benchmark::State& state) {
  const TorusPoint q1(std::vector<Rational>{Rational(12 * 12 * 12, 125), Rational(-49, 4)});
  const TorusPoint q2(std::vector<Rational>{Rational(12, 5), Rational(7, 2)});
  const GroupGamma gamma(2, {TorusPoint(std::vector<Rational>{Rational(3), Rational(-1)})});
  for (auto _ : state) benchmark::DoNotOptimize(solve_dependence(q1, q2, gamma));
}
BENCHMARK(BM_SolveDependence);

void BM_OrbitEnumerate(benchmark::State& state) {
  const auto maps = make_example_maps(1, 8, 1);
  const GeneratorList gens = {maps.phi1, maps.phi2};
  OrbitBudget budget;
  budget.max_degree = static_cast<std::uint64_t>(state.range(0));
  const auto seed = ProjectivePoint::from_ints({3, 7});
  for (auto _ : state) benchmark::DoNotOptimize(orbit_enumerate(gens, seed, budget));
}
BENCHMARK(BM_OrbitEnumerate)->Arg(64)->Arg(512);

void BM_CanonicalHeight(benchmark::State& state) {
  SplitMix64 rng(4);
  const GeneratorList gens = {random_morphism(1, 2, 3, rng), random_morphism(1, 2, 3, rng)};
  const auto gamma = InfiniteWord::repeating(Word({1, 0}));
  CanonicalHeightOptions o;
  o.fixed_stages = true;
  o.max_stages = static_cast<std::size_t>(state.range(0));
  const auto p = ProjectivePoint::from_ints({2, 5});
  for (auto _ : state) benchmark::DoNotOptimize(canonical_height_estimate(gamma, gens, p, o));
}
BENCHMARK(BM_CanonicalHeight)->Arg(10)->Arg(15);

void BM_ScanT1Squaring(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.generators = {squaring()};
  const std::size_t idx[] = {0, 1};
  cfg.divisor = Divisor::coordinate_product(1, idx);
  cfg.seed_height_bound = std::log(static_cast<double>(state.range(0)));
  cfg.gamma = {TorusPoint(std::vector<Rational>{Rational(2)})};
  cfg.budget.max_degree = 16;
  for (auto _ : state) benchmark::DoNotOptimize(scan_theorem1(cfg));
}
BENCHMARK(BM_ScanT1Squaring)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
