#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvdiff/dataset.hpp"
#include "tvdiff/denoiser.hpp"
#include "tvdiff/diffusion.hpp"
#include "tvdiff/negsampler.hpp"
#include "tvdiff/objective.hpp"
#include "tvdiff/types.hpp"

namespace tvdiff::trainer {

struct TrainConfig {
  int batch_size = 512;
  double lr = 1e-3;
  double reg = 1e-4;
  int max_epochs = 200;
  int patience = 10;           // consecutive non-improving validation epochs
  std::string monitor = "recall@20";
  std::uint64_t seed = 0;
  Index d = 64;
  double val_fraction = 0.05;  // per-user train holdout driving early stopping

  // Diffusion schedule.
  int T = 50;
  double s = 1e-4;
  double beta_min = 5e-4;
  double beta_max = 5e-3;

  objective::ObjectiveConfig objective;
  negsampler::NegSamplerConfig sampler;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;          // summed batch totals
  double energy_term = 0.0;
  double entropy_term = 0.0;
  double monitor_value = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  denoiser::DenoiserParams params;  // best checkpoint under the monitor
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_monitor = 0.0;
};

// The training loop: per epoch, shuffled user batches are corrupted at
// per-row timesteps drawn from Uniform{1..T}, denoised, paired with sampled
// negatives and optimized with Adam on the free-energy loss. Validation
// ranks each user's held-out train items with a deterministic single-pass
// reconstruction, and training stops after `patience` non-improving epochs.
// Negative draws act as constants in the loss (no gradient flows through the
// sampling distribution).
TrainResult train(const dataset::InteractionDataset& ds, const TrainConfig& cfg);

// Deterministic one-pass reconstruction used by validation and fast
// evaluation: rows [start, start+len) of the model input (rows of R_hat, or
// of R in binary target mode) are scaled by sqrt(alpha_bar_1) — the
// noise-free corruption at t=1 — and denoised once at timestep 1.
Mat reconstruct_slab(const denoiser::DenoiserParams& params,
                     const dataset::BipartiteMatrices& mats,
                     const diffusion::NoiseSchedule& sch,
                     objective::TargetMode target_mode, Index start, Index len);

// Dense copy of rows [start, start+len) of a sparse matrix.
Mat dense_rows(const SpMat& sp, Index start, Index len);

}  // namespace tvdiff::trainer
