#include "tvdiff/denoiser.hpp"

#include <cmath>
#include <stdexcept>

#include "tvdiff/rng.hpp"

namespace tvdiff::denoiser {

namespace {

constexpr double kDegenerateL1 = 1e-12;

void fill_xavier(Mat& w, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Index r = 0; r < w.rows(); ++r)
    for (Index c = 0; c < w.cols(); ++c)
      w(r, c) = (2.0 * rng.uniform01() - 1.0) * limit;
}

}  // namespace

DenoiserParams init_params(Index m, Index n, int T, Index d, std::uint64_t seed) {
  if (m < 1 || n < 1 || T < 1 || d < 1)
    throw std::runtime_error("init_params needs positive dimensions");

  DenoiserParams p;
  p.m = m;
  p.n = n;
  p.T = T;
  p.d = d;
  p.W_I.resize(n, d);
  p.W_U.resize(m, d);
  p.E_time.resize(T + 1, d);

  Rng rng = Rng::derive(seed, Stream::kParamInit);
  fill_xavier(p.W_I, rng);
  fill_xavier(p.W_U, rng);
  fill_xavier(p.E_time, rng);
  return p;
}

ForwardResult forward(const Mat& xt, const std::vector<int>& t,
                      const SpMat& R_bar, const DenoiserParams& params) {
  const Index B = xt.rows();
  if (xt.cols() != params.n)
    throw std::runtime_error("forward: xt has wrong item dimension");
  if (static_cast<Index>(t.size()) != B)
    throw std::runtime_error("forward: one timestep per row required");
  if (R_bar.rows() != params.m || R_bar.cols() != params.n)
    throw std::runtime_error("forward: R_bar shape mismatch");
  for (int tb : t)
    if (tb < 0 || tb > params.T)
      throw std::runtime_error("forward: timestep outside [0,T]");

  ForwardResult out;
  DenoiserCache& cache = out.cache;
  cache.t = t;

  // User branch: h = tanh(x_t W_I + e_t), e_t broadcast per row.
  Mat A = xt * params.W_I;
  for (Index b = 0; b < B; ++b)
    A.row(b) += params.E_time.row(t[static_cast<std::size_t>(b)]);
  cache.h = A.array().tanh();

  // Item branch: H = tanh(R_bar^T W_U); independent of x_t and t.
  Mat P = R_bar.transpose() * params.W_U;
  cache.H = P.array().tanh();

  out.scores.noalias() = cache.h * cache.H.transpose();

  cache.l1.resize(B);
  cache.degenerate.assign(static_cast<std::size_t>(B), 0);
  out.normalized.resize(B, params.n);
  for (Index b = 0; b < B; ++b) {
    const double l1 = out.scores.row(b).array().abs().sum();
    cache.l1[b] = l1;
    if (l1 < kDegenerateL1) {
      cache.degenerate[static_cast<std::size_t>(b)] = 1;
      out.normalized.row(b) = out.scores.row(b);
    } else {
      out.normalized.row(b) = out.scores.row(b) / l1;
    }
  }
  return out;
}

DenoiserGrads backward(const ForwardResult& fwd, const Mat& grad_normalized,
                       const DenoiserParams& params, const Mat& xt,
                       const SpMat& R_bar) {
  const DenoiserCache& cache = fwd.cache;
  const Index B = fwd.scores.rows();
  if (grad_normalized.rows() != B || grad_normalized.cols() != params.n ||
      xt.rows() != B || xt.cols() != params.n ||
      cache.h.rows() != B)
    throw std::runtime_error("backward: stale or mismatched cache");

  // Through the L1 normalization: with y = x/nu, nu = sum|x|,
  //   dL/dx_k = (g_k - (g . y) sign(x_k)) / nu.
  Mat grad_scores(B, params.n);
  for (Index b = 0; b < B; ++b) {
    if (cache.degenerate[static_cast<std::size_t>(b)]) {
      grad_scores.row(b) = grad_normalized.row(b);
      continue;
    }
    const double nu = cache.l1[b];
    const double g_dot_y = grad_normalized.row(b).dot(fwd.normalized.row(b));
    for (Index j = 0; j < params.n; ++j) {
      const double x = fwd.scores(b, j);
      const double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      grad_scores(b, j) = (grad_normalized(b, j) - g_dot_y * sgn) / nu;
    }
  }

  // Bilinear product x_tilde = h H^T.
  Mat grad_h = grad_scores * cache.H;                    // B x d
  Mat grad_H = grad_scores.transpose() * cache.h;        // n x d

  // tanh backward on both branches.
  Mat grad_A = grad_h.array() * (1.0 - cache.h.array().square());
  Mat grad_P = grad_H.array() * (1.0 - cache.H.array().square());

  DenoiserGrads g;
  g.W_I.noalias() = xt.transpose() * grad_A;             // n x d
  g.W_U = R_bar * grad_P;                                // m x d (sparse product)
  g.E_time = Mat::Zero(params.T + 1, params.d);
  for (Index b = 0; b < B; ++b)
    g.E_time.row(cache.t[static_cast<std::size_t>(b)]) += grad_A.row(b);
  return g;
}

}  // namespace tvdiff::denoiser
