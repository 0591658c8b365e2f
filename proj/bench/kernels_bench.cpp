// Serial reference vs OpenMP kernels. Argument 0 selects the policy.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sdot/core/sampler.hpp"
#include "sdot/parallel/kernels.hpp"

using namespace sdot;

namespace {

ExecPolicy policy_of(const benchmark::State& s) { return s.range(0) == 0 ? ExecPolicy::serial : ExecPolicy::parallel; }

DiscreteMeasure atoms(std::size_t n, std::size_t dim) {
  return DiscreteMeasure::uniform(draw(SamplerSpec::hypercube(dim, 99), n));
}

void BM_CostBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto nu = atoms(n, 3);
  const auto xs = draw(SamplerSpec::gaussian(3, 1), 20000);
  for (auto _ : state) benchmark::DoNotOptimize(CostMatrix::build(xs, nu, CostSpec::pnorm(2), policy_of(state)));
  state.SetItemsProcessed(state.iterations() * 20000 * static_cast<std::int64_t>(n));
}

void BM_DualTerms(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto nu = atoms(n, 3);
  const auto costs = CostMatrix::build(draw(SamplerSpec::gaussian(3, 2), 20000), nu, CostSpec::pnorm(2));
  const auto model = MarginalModel::exponential(0.1, MarginalModel::uniform_weights(n));
  std::vector<double> phi(n);
  std::mt19937_64 rng(3);
  for (double& v : phi) v = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(accumulate_dual_terms(phi, costs, {}, &model, 0.0, true, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * 20000);
}

void BM_HingeMean(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c1(m), c2(m);
  for (std::size_t j = 0; j < m; ++j) c1[j] = u(rng), c2[j] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(hinge_mean(0.1, c1, c2, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}

}  // namespace

BENCHMARK(BM_CostBuild)->ArgsProduct({{0, 1}, {10, 100}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualTerms)->ArgsProduct({{0, 1}, {10, 100}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HingeMean)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
