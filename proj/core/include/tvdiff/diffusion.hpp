#pragma once

#include <vector>

#include "tvdiff/denoiser.hpp"
#include "tvdiff/rng.hpp"
#include "tvdiff/types.hpp"

namespace tvdiff::diffusion {

// Linear beta schedule over T steps. Arrays are indexed by timestep t in
// [0, T]; index 0 holds the "no corruption" boundary values (beta=0, alpha=1,
// alpha_bar=1) so posterior coefficients can read alpha_bar[t-1] directly.
struct NoiseSchedule {
  int T = 0;
  double s = 0.0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::vector<double> beta;       // beta[t], t in [0,T]; beta[0] = 0
  std::vector<double> alpha;      // 1 - beta[t]; alpha[0] = 1
  std::vector<double> alpha_bar;  // prod_{t'<=t} alpha[t']; alpha_bar[0] = 1
};

// beta_t = beta_min + (t-1)/max(T-1,1) * (beta_max - beta_min).
NoiseSchedule build_schedule(int T, double s, double beta_min, double beta_max);

// x_t = sqrt(alpha_bar_t) * x0 + s * sqrt(1 - alpha_bar_t) * eps,
// eps ~ N(0, I) per coordinate. With s = 0 no randomness is consumed.
Vec forward_sample(const Eigen::Ref<const Vec>& x0, int t,
                   const NoiseSchedule& sch, Rng& rng);
// Batch variant with one timestep per row; rows are corrupted in order.
Mat forward_sample_batch(const Mat& x0, const std::vector<int>& t,
                         const NoiseSchedule& sch, Rng& rng);

// Gaussian posterior mean
//   mu = sqrt(alpha_bar_{t-1}) beta_t / (1-alpha_bar_t) * x0_hat
//      + sqrt(alpha_t) (1-alpha_bar_{t-1}) / (1-alpha_bar_t) * x_t;
// deterministic (reverse process never resamples), t = 1 returns x0_hat.
Mat posterior_step(const Mat& xt, const Mat& x0_hat, int t,
                   const NoiseSchedule& sch);

// Full inference chain: corrupt x0 to x_T (noise only when s > 0), then for
// t = T..1 estimate x0 with the denoiser and take the posterior mean. Returns
// the final reconstruction; rows of `mask_train` (indexed from `row_offset`)
// are set to -inf so train items never surface in rankings.
Mat reverse_trajectory(const Mat& x0, const NoiseSchedule& sch,
                       const denoiser::DenoiserParams& params,
                       const SpMat& R_bar, Rng& rng,
                       const std::vector<std::vector<Index>>* mask_train = nullptr,
                       Index row_offset = 0);

}  // namespace tvdiff::diffusion
