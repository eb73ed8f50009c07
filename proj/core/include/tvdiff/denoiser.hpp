#pragma once

#include <cstdint>
#include <vector>

#include "tvdiff/types.hpp"

namespace tvdiff::denoiser {

// Learnable state of the anisotropic denoiser
//   x_tilde = tanh(x_t W_I + e_t) * tanh(R_bar^T W_U)^T,
// followed by row-wise L1 normalization. E_time row t is the embedding e_t;
// row 0 is reserved for "no corruption" inputs.
struct DenoiserParams {
  Index m = 0;
  Index n = 0;
  int T = 0;
  Index d = 0;
  Mat W_I;     // n x d, item-side transform
  Mat W_U;     // m x d, user-side transform
  Mat E_time;  // (T+1) x d, per-timestep embeddings
};

struct DenoiserGrads {
  Mat W_I;
  Mat W_U;
  Mat E_time;
};

// Backpropagation workspace captured by forward().
struct DenoiserCache {
  Mat h;                           // B x d, tanh(x_t W_I + e_t)
  Mat H;                           // n x d, tanh(R_bar^T W_U)
  Vec l1;                          // B, row L1 norms of the raw scores
  std::vector<int> t;              // per-row timestep
  std::vector<std::uint8_t> degenerate;  // rows with L1 norm < 1e-12
};

struct ForwardResult {
  Mat scores;      // B x n, raw x_tilde
  Mat normalized;  // B x n, x_tilde / ||x_tilde||_1 (degenerate rows passed through)
  DenoiserCache cache;
};

// Xavier-uniform init: each matrix is drawn from +-sqrt(6/(rows+cols)) using
// its own dimensions as fans. Entries are drawn row-major, W_I then W_U then
// E_time, from one stream, so the layout is reproducible byte for byte.
DenoiserParams init_params(Index m, Index n, int T, Index d, std::uint64_t seed);

// Per-row t must lie in [0, T]. H depends only on (R_bar, W_U) and is
// computed once per call, shared across the batch.
ForwardResult forward(const Mat& xt, const std::vector<int>& t,
                      const SpMat& R_bar, const DenoiserParams& params);

// Exact gradients of a scalar loss through the normalized output. The L1
// normalization Jacobian uses sign(x_tilde) with sign(0) = 0; degenerate rows
// backpropagate as identity (they were passed through unnormalized).
DenoiserGrads backward(const ForwardResult& fwd, const Mat& grad_normalized,
                       const DenoiserParams& params, const Mat& xt,
                       const SpMat& R_bar);

}  // namespace tvdiff::denoiser
