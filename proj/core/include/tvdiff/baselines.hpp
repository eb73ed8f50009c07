#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvdiff/dataset.hpp"
#include "tvdiff/negsampler.hpp"
#include "tvdiff/types.hpp"

namespace tvdiff::baselines {

struct MFParams {
  Mat E_U;  // m x d user embeddings
  Mat E_I;  // n x d item embeddings
};

struct BprConfig {
  Index d = 64;
  double lr = 0.01;
  double reg = 1e-4;
  int max_epochs = 200;
  int patience = 10;
  int batch_pairs = 4096;
  negsampler::Strategy strategy = negsampler::Strategy::kRns;
  double gamma = 0.05;
  double lambda = 3.0;
  double epsilon = 1e-10;
  std::uint64_t seed = 0;
  double val_fraction = 0.05;
  std::string monitor = "recall@20";

  void validate() const;
};

struct BprEpochLog {
  int epoch = 0;
  double loss = 0.0;               // summed pair losses
  double mean_user_entropy = 0.0;  // Shannon entropy of softmax(E_U E_I^T), / m
  double monitor_value = 0.0;
  double seconds = 0.0;
};

struct BprResult {
  MFParams params;  // best checkpoint under the monitor
  std::vector<BprEpochLog> log;
  int best_epoch = 0;
  double best_monitor = 0.0;
  double initial_mean_entropy = 0.0;  // at initialization, before any update
  double final_mean_entropy = 0.0;    // at the early-stopped (best) epoch
};

double mf_score(const MFParams& params, Index u, Index i);

// Xavier-uniform embeddings drawn from the parameter-init stream of `seed`;
// the trainer starts from exactly this state.
MFParams init_params(Index m, Index n, Index d, std::uint64_t seed);

// Pairwise BPR trainer with Adam, L2 regularization and the same per-user
// validation-holdout early stopping as the diffusion trainer. Negative
// strategies RNS / AR-GSP / sublinear share the negsampler implementation;
// score-based strategies rank each batch user's current scores e_u E_I^T.
BprResult train_bpr_mf(const dataset::InteractionDataset& ds,
                       const BprConfig& cfg);

}  // namespace tvdiff::baselines
