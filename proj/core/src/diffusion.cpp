#include "tvdiff/diffusion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvdiff::diffusion {

NoiseSchedule build_schedule(int T, double s, double beta_min, double beta_max) {
  if (T < 1) throw std::runtime_error("schedule needs T >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
    throw std::runtime_error("schedule needs 0 < beta_min <= beta_max < 1");
  if (s < 0.0) throw std::runtime_error("noise scale s must be >= 0");

  NoiseSchedule sch;
  sch.T = T;
  sch.s = s;
  sch.beta_min = beta_min;
  sch.beta_max = beta_max;
  sch.beta.assign(static_cast<std::size_t>(T) + 1, 0.0);
  sch.alpha.assign(static_cast<std::size_t>(T) + 1, 1.0);
  sch.alpha_bar.assign(static_cast<std::size_t>(T) + 1, 1.0);

  const double denom = static_cast<double>(std::max(T - 1, 1));
  for (int t = 1; t <= T; ++t) {
    const double beta = beta_min + (t - 1) / denom * (beta_max - beta_min);
    sch.beta[static_cast<std::size_t>(t)] = beta;
    sch.alpha[static_cast<std::size_t>(t)] = 1.0 - beta;
    sch.alpha_bar[static_cast<std::size_t>(t)] =
        sch.alpha_bar[static_cast<std::size_t>(t) - 1] * (1.0 - beta);
  }
  return sch;
}

namespace {

void check_t(int t, const NoiseSchedule& sch) {
  if (t < 1 || t > sch.T)
    throw std::runtime_error("timestep " + std::to_string(t) +
                             " outside [1," + std::to_string(sch.T) + "]");
}

}  // namespace

Vec forward_sample(const Eigen::Ref<const Vec>& x0, int t,
                   const NoiseSchedule& sch, Rng& rng) {
  check_t(t, sch);
  const double ab = sch.alpha_bar[static_cast<std::size_t>(t)];
  const double scale = std::sqrt(ab);
  const double sigma = sch.s * std::sqrt(1.0 - ab);

  Vec xt = scale * x0;
  if (sigma > 0.0)
    for (Index j = 0; j < xt.size(); ++j) xt[j] += sigma * rng.normal();
  return xt;
}

Mat forward_sample_batch(const Mat& x0, const std::vector<int>& t,
                         const NoiseSchedule& sch, Rng& rng) {
  if (static_cast<Index>(t.size()) != x0.rows())
    throw std::runtime_error("one timestep per batch row required");
  Mat xt(x0.rows(), x0.cols());
  for (Index b = 0; b < x0.rows(); ++b)
    xt.row(b) = forward_sample(x0.row(b).transpose(),
                               t[static_cast<std::size_t>(b)], sch, rng)
                    .transpose();
  return xt;
}

Mat posterior_step(const Mat& xt, const Mat& x0_hat, int t,
                   const NoiseSchedule& sch) {
  check_t(t, sch);
  if (xt.rows() != x0_hat.rows() || xt.cols() != x0_hat.cols())
    throw std::runtime_error("posterior_step shape mismatch");
  if (t == 1) return x0_hat;

  const double ab_t = sch.alpha_bar[static_cast<std::size_t>(t)];
  const double ab_prev = sch.alpha_bar[static_cast<std::size_t>(t) - 1];
  const double beta_t = sch.beta[static_cast<std::size_t>(t)];
  const double alpha_t = sch.alpha[static_cast<std::size_t>(t)];
  const double c0 = std::sqrt(ab_prev) * beta_t / (1.0 - ab_t);
  const double c1 = std::sqrt(alpha_t) * (1.0 - ab_prev) / (1.0 - ab_t);
  return c0 * x0_hat + c1 * xt;
}

Mat reverse_trajectory(const Mat& x0, const NoiseSchedule& sch,
                       const denoiser::DenoiserParams& params,
                       const SpMat& R_bar, Rng& rng,
                       const std::vector<std::vector<Index>>* mask_train,
                       Index row_offset) {
  const Index B = x0.rows();
  std::vector<int> t_rows(static_cast<std::size_t>(B), sch.T);
  Mat x = forward_sample_batch(x0, t_rows, sch, rng);

  for (int t = sch.T; t >= 1; --t) {
    std::fill(t_rows.begin(), t_rows.end(), t);
    denoiser::ForwardResult fwd = denoiser::forward(x, t_rows, R_bar, params);
    x = posterior_step(x, fwd.normalized, t, sch);
  }

  if (mask_train != nullptr) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (Index b = 0; b < B; ++b) {
      const auto& items = (*mask_train)[static_cast<std::size_t>(row_offset + b)];
      for (Index i : items) x(b, i) = neg_inf;
    }
  }
  return x;
}

}  // namespace tvdiff::diffusion
