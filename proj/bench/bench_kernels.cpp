#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "grwalk/dictionary.hpp"
#include "grwalk/graphon.hpp"
#include "grwalk/kernels.hpp"
#include "grwalk/rng.hpp"

namespace {

using grwalk::kernels::Backend;

std::vector<double> uniform_samples(std::size_t m, std::uint64_t seed) {
  grwalk::Rng rng(seed);
  std::vector<double> xs(m);
  for (auto& x : xs) x = rng.uniform();
  return xs;
}

Backend backend_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Backend::serial : Backend::parallel;
}

void BM_CrossMoment(benchmark::State& state) {
  const auto xs = uniform_samples(static_cast<std::size_t>(state.range(1)), 1);
  const auto ys = uniform_samples(xs.size(), 2);
  const auto d = grwalk::make_gaussian(20, 0.05);
  const grwalk::Matrix a = d.evaluate(xs), b = d.evaluate(ys);
  for (auto _ : state) benchmark::DoNotOptimize(grwalk::kernels::cross_moment(a, b, backend_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_CrossMoment)->ArgsProduct({{0, 1}, {20000, 200000}})->Unit(benchmark::kMillisecond);

void BM_Tabulate(benchmark::State& state) {
  const auto g = grwalk::builtin::triple_peak();
  const auto nodes = grwalk::MidpointGrid{static_cast<int>(state.range(1))}.nodes();
  const std::span<const double> xs(nodes.data(), static_cast<std::size_t>(nodes.size()));
  auto f = [&g](double x, double y) { return g(x, y); };
  for (auto _ : state) benchmark::DoNotOptimize(grwalk::kernels::tabulate(f, xs, xs, backend_of(state)));
}
BENCHMARK(BM_Tabulate)->ArgsProduct({{0, 1}, {500, 1000}})->Unit(benchmark::kMillisecond);

void BM_KernelDensity(benchmark::State& state) {
  auto samples = uniform_samples(static_cast<std::size_t>(state.range(1)), 3);
  std::sort(samples.begin(), samples.end());
  const auto nodes = grwalk::MidpointGrid{1000}.nodes();
  const std::span<const double> xs(nodes.data(), static_cast<std::size_t>(nodes.size()));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        grwalk::kernels::kde_evaluate(samples, 0.02, xs, grwalk::kernels::Boundary::reflect, backend_of(state)));
}
BENCHMARK(BM_KernelDensity)->ArgsProduct({{0, 1}, {20000, 200000}})->Unit(benchmark::kMillisecond);

void BM_NearestCenter(benchmark::State& state) {
  const auto xs = uniform_samples(static_cast<std::size_t>(state.range(1)) * 5, 4);
  const grwalk::Matrix points = Eigen::Map<const grwalk::Matrix>(xs.data(), state.range(1), 5);
  const grwalk::Matrix centers = points.topRows(5);
  for (auto _ : state) benchmark::DoNotOptimize(grwalk::kernels::nearest_center(points, centers, backend_of(state)));
}
BENCHMARK(BM_NearestCenter)->ArgsProduct({{0, 1}, {20000, 200000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
