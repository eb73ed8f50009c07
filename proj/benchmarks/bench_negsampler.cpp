#include <benchmark/benchmark.h>

#include <numeric>

#include "tvdiff/negsampler.hpp"
#include "tvdiff/rng.hpp"

using namespace tvdiff;

namespace {

void BM_ArDistribution(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(1);
  Vec scores(n);
  for (Index i = 0; i < n; ++i) scores[i] = rng.normal();
  std::vector<Index> train;
  for (Index i = 0; i < n; i += 37) train.push_back(i);
  for (auto _ : state) {
    Vec p = negsampler::ar_distribution(scores, train, 0.05);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ArDistribution)->Arg(2048)->Arg(17632);

void BM_SampleNegatives(benchmark::State& state) {
  const Index n = 17632;
  const Index B = state.range(0);
  const int T = 50;
  Rng rng(2);
  Mat scores(B, n);
  for (Index b = 0; b < B; ++b)
    for (Index i = 0; i < n; ++i) scores(b, i) = rng.normal();
  std::vector<Index> users(static_cast<std::size_t>(B));
  std::iota(users.begin(), users.end(), Index{0});
  IndexRows positives(static_cast<std::size_t>(B));
  std::vector<int> t(static_cast<std::size_t>(B));
  for (Index b = 0; b < B; ++b) {
    auto& row = positives[static_cast<std::size_t>(b)];
    for (Index k = 0; k < 40; ++k)
      row.push_back(static_cast<Index>(rng.uniform_below(n)));
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    t[static_cast<std::size_t>(b)] = 1 + static_cast<int>(rng.uniform_below(T));
  }
  negsampler::NegSamplerConfig cfg;
  cfg.strategy = state.range(1) == 0   ? negsampler::Strategy::kArGsp
                 : state.range(1) == 1 ? negsampler::Strategy::kRns
                                       : negsampler::Strategy::kSublinear;
  for (auto _ : state) {
    Rng draw_rng(3);
    auto draws = negsampler::sample_negatives(users, positives, positives,
                                              scores, t, cfg, T, draw_rng);
    benchmark::DoNotOptimize(draws.data());
  }
  state.SetItemsProcessed(state.iterations() * B);
}
BENCHMARK(BM_SampleNegatives)
    ->Args({64, 0})
    ->Args({64, 1})
    ->Args({64, 2})
    ->Args({512, 0});

}  // namespace
