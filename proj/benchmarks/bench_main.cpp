#include <benchmark/benchmark.h>

#include <vector>

#include "fpv/combinatorics.hpp"
#include "fpv/fbm.hpp"
#include "fpv/random.hpp"
#include "fpv/wick.hpp"

namespace {

void BM_FgnSample(benchmark::State& state, fpv::FgnMethod method) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto sampler = fpv::fgn_sampler(n, 0.7, method);
  fpv::NormalStream rng(1);
  std::vector<double> out(n);
  for (auto _ : state) {
    sampler->sample(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_FgnSample, circulant, fpv::FgnMethod::circulant)->RangeMultiplier(4)->Range(64, 16384);
BENCHMARK_CAPTURE(BM_FgnSample, cholesky, fpv::FgnMethod::cholesky)->RangeMultiplier(4)->Range(64, 1024);

void BM_RhoDoubleSum(benchmark::State& state) {
  const double tol = state.range(0) == 0 ? 1e-4 : 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(fpv::rho_double_sum(0, 1, 1, fpv::HurstParam(0.75), tol).value);
}
BENCHMARK(BM_RhoDoubleSum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ChaosEvaluate(benchmark::State& state) {
  auto ctx = fpv::reference_context_3();
  const int p = static_cast<int>(state.range(0));
  auto term = fpv::ChaosTerm::from(3, {{0, p}, {1, p}, {2, p}});
  const std::vector<double> x{0.3, -0.7, 1.1};
  for (auto _ : state) benchmark::DoNotOptimize(fpv::chaos_evaluate(term, ctx, x));
}
BENCHMARK(BM_ChaosEvaluate)->DenseRange(1, 5);

}  // namespace

BENCHMARK_MAIN();
