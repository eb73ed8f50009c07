#include <doctest.h>

#include <cmath>
#include <vector>

#include "expected/diffusion_oracle.inc"
#include "support/synthetic.hpp"
#include "tvdiff/dataset.hpp"
#include "tvdiff/diffusion.hpp"

using namespace tvdiff;

TEST_SUITE("diffusion") {

TEST_CASE("schedule: T=2 hand values and boundary index 0") {
  const auto sch = diffusion::build_schedule(2, 0.1, 0.1, 0.3);
  CHECK(sch.beta[0] == 0.0);
  CHECK(sch.alpha[0] == 1.0);
  CHECK(sch.alpha_bar[0] == 1.0);
  CHECK(sch.beta[1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(sch.beta[2] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(sch.alpha_bar[1] == doctest::Approx(kAlphaBarT2[0]).epsilon(1e-15));
  CHECK(sch.alpha_bar[2] == doctest::Approx(kAlphaBarT2[1]).epsilon(1e-15));
}

TEST_CASE("schedule: T=50 cumulative product matches the high-precision oracle") {
  const auto sch = diffusion::build_schedule(50, 1e-4, 1e-3, 1e-2);
  CHECK(sch.beta[50] == doctest::Approx(kBeta50Last).epsilon(1e-15));
  CHECK(sch.alpha_bar[50] == doctest::Approx(kAlphaBar50).epsilon(1e-13));
  CHECK(sch.alpha_bar[25] == doctest::Approx(kAlphaBar25).epsilon(1e-13));
}

TEST_CASE("schedule identities: alpha_bar_t = alpha_t * alpha_bar_{t-1}, monotone") {
  const auto sch = diffusion::build_schedule(40, 0.1, 2e-3, 8e-2);
  for (int t = 1; t <= 40; ++t) {
    CHECK(sch.alpha[t] == doctest::Approx(1.0 - sch.beta[t]).epsilon(1e-15));
    CHECK(sch.alpha_bar[t] ==
          doctest::Approx(sch.alpha[t] * sch.alpha_bar[t - 1]).epsilon(1e-14));
    CHECK(sch.alpha_bar[t] < sch.alpha_bar[t - 1]);
    CHECK(sch.beta[t] >= sch.beta[t - 1]);
  }
}

TEST_CASE("schedule: T=1 uses beta_min only") {
  const auto sch = diffusion::build_schedule(1, 0.0, 5e-3, 9e-1);
  CHECK(sch.beta[1] == doctest::Approx(5e-3).epsilon(1e-15));
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(diffusion::build_schedule(0, 0.1, 1e-3, 1e-2), std::runtime_error);
  CHECK_THROWS_AS(diffusion::build_schedule(5, 0.1, 0.0, 1e-2), std::runtime_error);
  CHECK_THROWS_AS(diffusion::build_schedule(5, 0.1, 1e-2, 1e-3), std::runtime_error);
  CHECK_THROWS_AS(diffusion::build_schedule(5, 0.1, 1e-3, 1.0), std::runtime_error);
  CHECK_THROWS_AS(diffusion::build_schedule(5, -0.1, 1e-3, 1e-2), std::runtime_error);
}

TEST_CASE("forward: s=0 is the deterministic sqrt(alpha_bar) scaling") {
  const auto sch = diffusion::build_schedule(10, 0.0, 1e-3, 1e-2);
  Rng rng(0);
  Vec x0(4);
  x0 << 1.0, -2.0, 0.5, 0.0;
  const Vec xt = diffusion::forward_sample(x0, 7, sch, rng);
  for (Index j = 0; j < 4; ++j)
    CHECK(xt[j] == doctest::Approx(std::sqrt(sch.alpha_bar[7]) * x0[j]).epsilon(1e-15));
  // No randomness consumed: the stream continues exactly where it started.
  Rng a(55), b(55);
  (void)diffusion::forward_sample(x0, 3, sch, a);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forward: timestep outside [1,T] is rejected") {
  const auto sch = diffusion::build_schedule(10, 0.5, 1e-3, 1e-2);
  Rng rng(1);
  Vec x0(3);
  x0 << 0.25, -1.0, 3.0;
  CHECK_THROWS_AS((void)diffusion::forward_sample(x0, 0, sch, rng), std::runtime_error);
  CHECK_THROWS_AS((void)diffusion::forward_sample(x0, 11, sch, rng), std::runtime_error);
  CHECK_NOTHROW((void)diffusion::forward_sample(x0, 1, sch, rng));
  CHECK_NOTHROW((void)diffusion::forward_sample(x0, 10, sch, rng));
}

TEST_CASE("forward moments match s^2 (1 - alpha_bar_t) at t=T") {
  const int T = 5;
  const double s = 0.3;
  const auto sch = diffusion::build_schedule(T, s, 0.02, 0.2);
  Rng rng = Rng::derive(0, Stream::kCorrupt);
  const int draws = 100000;
  Vec x0(1);
  x0 << 0.7;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = diffusion::forward_sample(x0, T, sch, rng)[0];
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  const double want_mean = std::sqrt(sch.alpha_bar[T]) * x0[0];
  const double want_var = s * s * (1.0 - sch.alpha_bar[T]);
  const double sigma = std::sqrt(want_var / draws);
  CHECK(std::abs(mean - want_mean) < 3.0 * sigma);
  CHECK(std::abs(var - want_var) / want_var < 0.02);
}

TEST_CASE("forward batch corrupts rows in order with per-row timesteps") {
  const auto sch = diffusion::build_schedule(6, 0.2, 1e-3, 1e-2);
  Mat x0(3, 4);
  x0 << 1, 0, 0, 1, 0, 1, 1, 0, 1, 1, 1, 1;
  Rng a(77);
  const Mat batch = diffusion::forward_sample_batch(x0, {1, 4, 6}, sch, a);
  Rng b(77);
  Mat rows(3, 4);
  rows.row(0) = diffusion::forward_sample(x0.row(0).transpose(), 1, sch, b).transpose();
  rows.row(1) = diffusion::forward_sample(x0.row(1).transpose(), 4, sch, b).transpose();
  rows.row(2) = diffusion::forward_sample(x0.row(2).transpose(), 6, sch, b).transpose();
  CHECK((batch - rows).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("posterior coefficients match the rational-arithmetic oracle (T=3)") {
  const auto sch = diffusion::build_schedule(3, 0.1, 0.1, 0.3);
  Mat xt(1, 2), x0_hat(1, 2);
  xt << 0.37, -0.82;
  x0_hat << -0.15, 0.46;
  for (int t = 1; t <= 3; ++t) {
    const Mat mu = diffusion::posterior_step(xt, x0_hat, t, sch);
    for (Index j = 0; j < 2; ++j)
      CHECK(mu(0, j) == doctest::Approx(kPosteriorC0[t - 1] * x0_hat(0, j) +
                                        kPosteriorC1[t - 1] * xt(0, j))
                            .epsilon(1e-13));
  }
}

TEST_CASE("posterior at t=1 returns x0_hat exactly") {
  const auto sch = diffusion::build_schedule(5, 0.1, 1e-3, 1e-2);
  Mat xt(2, 3), x0_hat(2, 3);
  xt.setRandom();
  x0_hat.setRandom();
  const Mat mu = diffusion::posterior_step(xt, x0_hat, 1, sch);
  CHECK((mu - x0_hat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trajectory with identity-like stub: s=0 reduces to scaled inputs") {
  // With s = 0 the corruption is deterministic; a denoiser that echoed its
  // input back would make each posterior step a pure rescaling. We simulate
  // the 3-step trace by hand with the real posterior and compare against
  // feeding the same x0_hat sequence manually.
  const auto sch = diffusion::build_schedule(3, 0.0, 0.05, 0.2);
  Mat x0(1, 3);
  x0 << 0.5, 0.0, 1.0;
  Mat xt = std::sqrt(sch.alpha_bar[3]) * x0;
  for (int t = 3; t >= 1; --t) {
    const Mat x0_hat = xt;  // identity denoiser stub
    xt = diffusion::posterior_step(xt, x0_hat, t, sch);
  }
  // Hand-folded coefficient: product over t of (c0(t) + c1(t)) applied to the
  // initial sqrt(alpha_bar_T)-scaled row.
  double coeff = std::sqrt(sch.alpha_bar[3]);
  for (int t = 3; t >= 1; --t) {
    const double denom = 1.0 - sch.alpha_bar[t];
    const double c0 = std::sqrt(sch.alpha_bar[t - 1]) * sch.beta[t] / denom;
    const double c1 = std::sqrt(sch.alpha[t]) * (1.0 - sch.alpha_bar[t - 1]) / denom;
    coeff *= c0 + c1;
  }
  for (Index j = 0; j < 3; ++j)
    CHECK(xt(0, j) == doctest::Approx(coeff * x0(0, j)).epsilon(1e-12));
}

TEST_CASE("reverse_trajectory masks train items at -inf") {
  const auto ds = testsupport::synthetic_dataset(6, 8, 2, 5, 0.8, 3);
  const auto mats = dataset::build_matrices(ds);
  const auto sch = diffusion::build_schedule(4, 1e-4, 5e-4, 5e-3);
  const auto params = denoiser::init_params(ds.m, ds.n, 4, 3, 0);
  Mat x0 = Mat::Zero(ds.m, ds.n);
  for (Index u = 0; u < ds.m; ++u)
    for (SpMat::InnerIterator it(mats.R_hat, u); it; ++it)
      x0(u, it.col()) = it.value();
  Rng rng = Rng::derive(0, Stream::kEval);
  const Mat rec = diffusion::reverse_trajectory(x0, sch, params, mats.R_bar, rng,
                                                &ds.train_items, 0);
  for (Index u = 0; u < ds.m; ++u) {
    for (Index i : ds.train_items[static_cast<std::size_t>(u)])
      CHECK(rec(u, i) == -std::numeric_limits<double>::infinity());
    for (Index i = 0; i < ds.n; ++i)
      if (!ds.is_train_positive(u, i)) CHECK(std::isfinite(rec(u, i)));
  }
}

TEST_CASE("reverse_trajectory is deterministic given the rng state") {
  const auto ds = testsupport::synthetic_dataset(5, 7, 2, 4, 0.8, 11);
  const auto mats = dataset::build_matrices(ds);
  const auto sch = diffusion::build_schedule(3, 0.1, 1e-3, 1e-2);
  const auto params = denoiser::init_params(ds.m, ds.n, 3, 2, 1);
  Mat x0 = Mat::Zero(ds.m, ds.n);
  for (Index u = 0; u < ds.m; ++u)
    for (SpMat::InnerIterator it(mats.R_hat, u); it; ++it)
      x0(u, it.col()) = it.value();
  Rng a = Rng::derive(4, Stream::kEval), b = Rng::derive(4, Stream::kEval);
  const Mat r1 = diffusion::reverse_trajectory(x0, sch, params, mats.R_bar, a);
  const Mat r2 = diffusion::reverse_trajectory(x0, sch, params, mats.R_bar, b);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
