#include <benchmark/benchmark.h>

#include "tvdiff/dataset.hpp"
#include "tvdiff/denoiser.hpp"
#include "tvdiff/diffusion.hpp"
#include "tvdiff/rng.hpp"

using namespace tvdiff;

namespace {

struct Fixture {
  dataset::InteractionDataset ds;
  dataset::BipartiteMatrices mats;
  denoiser::DenoiserParams params;
  Mat x0;
  std::vector<int> t;

  Fixture(Index m, Index n, Index d, int T, Index batch) {
    Rng rng = Rng::derive(0, Stream::kSynthetic, 11);
    std::vector<dataset::InteractionRecord> records;
    for (Index u = 0; u < m; ++u) {
      const Index deg = 5 + static_cast<Index>(rng.uniform_below(20));
      for (Index k = 0; k < deg; ++k)
        records.push_back({std::to_string(u),
                           std::to_string(rng.uniform_below(
                               static_cast<std::uint64_t>(n))),
                           1.0});
    }
    ds = dataset::split_dataset(records, 0.8, 0);
    mats = dataset::build_matrices(ds);
    params = denoiser::init_params(ds.m, ds.n, T, d, 0);
    x0 = Mat::Random(batch, ds.n);
    t.assign(static_cast<std::size_t>(batch), T / 2 + 1);
  }
};

void BM_DenoiserForward(benchmark::State& state) {
  Fixture f(512, 2048, 64, 50, state.range(0));
  for (auto _ : state) {
    auto fwd = denoiser::forward(f.x0, f.t, f.mats.R_bar, f.params);
    benchmark::DoNotOptimize(fwd.normalized.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DenoiserForward)->Arg(32)->Arg(128)->Arg(512);

void BM_DenoiserBackward(benchmark::State& state) {
  Fixture f(512, 2048, 64, 50, state.range(0));
  const auto fwd = denoiser::forward(f.x0, f.t, f.mats.R_bar, f.params);
  const Mat grad_out = Mat::Random(f.x0.rows(), f.x0.cols());
  for (auto _ : state) {
    auto grads = denoiser::backward(fwd, grad_out, f.params, f.x0, f.mats.R_bar);
    benchmark::DoNotOptimize(grads.W_I.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DenoiserBackward)->Arg(32)->Arg(128)->Arg(512);

void BM_ReverseTrajectory(benchmark::State& state) {
  Fixture f(512, 2048, 64, static_cast<int>(state.range(0)), 64);
  const auto sch = diffusion::build_schedule(static_cast<int>(state.range(0)),
                                             1e-4, 5e-4, 5e-3);
  Rng rng = Rng::derive(0, Stream::kEval);
  for (auto _ : state) {
    auto scores =
        diffusion::reverse_trajectory(f.x0, sch, f.params, f.mats.R_bar, rng);
    benchmark::DoNotOptimize(scores.data());
  }
}
BENCHMARK(BM_ReverseTrajectory)->Arg(5)->Arg(20)->Arg(50);

}  // namespace
