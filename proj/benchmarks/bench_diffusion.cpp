#include <benchmark/benchmark.h>

#include "tvdiff/diffusion.hpp"
#include "tvdiff/rng.hpp"

using namespace tvdiff;

namespace {

void BM_BuildSchedule(benchmark::State& state) {
  for (auto _ : state) {
    auto sch = diffusion::build_schedule(static_cast<int>(state.range(0)), 1e-4,
                                         5e-4, 5e-3);
    benchmark::DoNotOptimize(sch.alpha_bar.data());
  }
}
BENCHMARK(BM_BuildSchedule)->Arg(50)->Arg(1000);

void BM_ForwardSampleBatch(benchmark::State& state) {
  const Index B = state.range(0), n = 17632;
  const auto sch = diffusion::build_schedule(50, 1e-4, 5e-4, 5e-3);
  Mat x0 = Mat::Random(B, n);
  std::vector<int> t(static_cast<std::size_t>(B));
  Rng trng(4);
  for (auto& tb : t) tb = 1 + static_cast<int>(trng.uniform_below(50));
  for (auto _ : state) {
    Rng rng(5);
    Mat xt = diffusion::forward_sample_batch(x0, t, sch, rng);
    benchmark::DoNotOptimize(xt.data());
  }
  state.SetItemsProcessed(state.iterations() * B * n);
}
BENCHMARK(BM_ForwardSampleBatch)->Arg(32)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
