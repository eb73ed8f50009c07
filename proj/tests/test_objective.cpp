#include <doctest.h>

#include <cmath>
#include <vector>

#include "expected/objective_oracle.inc"
#include "tvdiff/objective.hpp"

using namespace tvdiff;

namespace {

Mat mat_from(const double* flat, Index rows, Index cols) {
  Mat m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
  return m;
}

void check_grad(const Mat& got, const double* want, double tol = 1e-12) {
  for (Index r = 0; r < got.rows(); ++r)
    for (Index c = 0; c < got.cols(); ++c)
      CHECK(got(r, c) == doctest::Approx(want[r * got.cols() + c]).epsilon(tol));
}

}  // namespace

TEST_SUITE("objective") {

TEST_CASE("energy matches the scalar-loop oracle") {
  const Mat target = mat_from(kEnergyTarget, 4, 6);
  const Mat rprime = mat_from(kEnergyRprime, 4, 6);
  Mat grad = Mat::Zero(4, 6);
  const double loss = objective::energy_loss(target, rprime, &grad);
  CHECK(loss == doctest::Approx(kEnergyLoss).epsilon(1e-12));
  check_grad(grad, kEnergyGrad);
}

TEST_CASE("energy of a perfect reconstruction is zero with zero gradient") {
  Mat t(3, 4);
  t.setRandom();
  Mat grad = Mat::Zero(3, 4);
  CHECK(objective::energy_loss(t, t, &grad) == 0.0);
  CHECK(grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bce matches the loop oracle (binary labels, clamp included)") {
  const Mat target = mat_from(kBceTarget, 2, 5);
  const Mat rprime = mat_from(kBceRprime, 2, 5);
  const IndexRows pos = {{kBcePos0[0], kBcePos0[1]}, {kBcePos1[0]}};
  const IndexRows neg = {{kBceNeg0[0], kBceNeg0[1]}, {kBceNeg1[0]}};
  Mat grad = Mat::Zero(2, 5);
  const double loss = objective::entropy_loss_bce(
      target, rprime, pos, neg, objective::BceLabelMode::kBinary, false, &grad);
  CHECK(loss == doctest::Approx(kBceLossBinary).epsilon(1e-12));
  check_grad(grad, kBceGradBinary);
}

TEST_CASE("bce normalized labels read the target entries") {
  const Mat target = mat_from(kBceTarget, 2, 5);
  const Mat rprime = mat_from(kBceRprime, 2, 5);
  const IndexRows pos = {{kBcePos0[0], kBcePos0[1]}, {kBcePos1[0]}};
  const IndexRows neg = {{kBceNeg0[0], kBceNeg0[1]}, {kBceNeg1[0]}};
  Mat grad = Mat::Zero(2, 5);
  const double loss = objective::entropy_loss_bce(
      target, rprime, pos, neg, objective::BceLabelMode::kNormalized, false, &grad);
  CHECK(loss == doctest::Approx(kBceLossNormalized).epsilon(1e-12));
  check_grad(grad, kBceGradNormalized);
}

TEST_CASE("bce flipped negative sign variant") {
  const Mat target = mat_from(kBceTarget, 2, 5);
  const Mat rprime = mat_from(kBceRprime, 2, 5);
  const IndexRows pos = {{kBcePos0[0], kBcePos0[1]}, {kBcePos1[0]}};
  const IndexRows neg = {{kBceNeg0[0], kBceNeg0[1]}, {kBceNeg1[0]}};
  Mat grad = Mat::Zero(2, 5);
  const double loss = objective::entropy_loss_bce(
      target, rprime, pos, neg, objective::BceLabelMode::kBinary, true, &grad);
  CHECK(loss == doctest::Approx(kBceLossFlipped).epsilon(1e-12));
  check_grad(grad, kBceGradFlipped);
}

TEST_CASE("bce with no negatives reduces to the positive term") {
  Mat rprime(1, 3);
  rprime << 0.5, -0.5, 2.0;
  Mat target = Mat::Zero(1, 3);
  target(0, 0) = 1.0;
  Mat g1 = Mat::Zero(1, 3), g2 = Mat::Zero(1, 3);
  const double with_empty = objective::entropy_loss_bce(
      target, rprime, {{0}}, {{}}, objective::BceLabelMode::kBinary, false, &g1);
  // Hand value: -log sigmoid(0.5)
  CHECK(with_empty == doctest::Approx(-std::log(1.0 / (1.0 + std::exp(-0.5))))
                          .epsilon(1e-12));
  CHECK(g1(0, 1) == 0.0);
  CHECK(g1(0, 2) == 0.0);
  (void)g2;
}

TEST_CASE("bpr matches the loop oracle") {
  const Mat rprime = mat_from(kBprRprime, 4, 6);
  IndexRows pos(4), neg(4);
  int k = 0;
  for (int b = 0; b < 4; ++b)
    for (int j = 0; j < kBprRowLen[b]; ++j, ++k) {
      pos[b].push_back(kBprPosFlat[k]);
      neg[b].push_back(kBprNegFlat[k]);
    }
  Mat grad = Mat::Zero(4, 6);
  const double loss = objective::entropy_loss_bpr(rprime, pos, neg, &grad);
  CHECK(loss == doctest::Approx(kBprLoss).epsilon(1e-12));
  check_grad(grad, kBprGrad);
}

TEST_CASE("bpr refuses unpaired lists") {
  Mat rprime(1, 3);
  rprime.setZero();
  CHECK_THROWS_AS(objective::entropy_loss_bpr(rprime, {{0, 1}}, {{2}}, nullptr),
                  std::runtime_error);
}

TEST_CASE("nll matches the high-precision oracle") {
  const Mat rprime = mat_from(kNllRprime, 2, 7);
  const IndexRows pos = {{kNllPos0[0], kNllPos0[1]}, {kNllPos1[0]}};
  Mat grad = Mat::Zero(2, 7);
  const double loss = objective::entropy_loss_nll(rprime, pos, &grad);
  CHECK(loss == doctest::Approx(kNllLoss).epsilon(1e-12));
  check_grad(grad, kNllGrad, 1e-11);
}

TEST_CASE("nll is invariant to per-row score shifts") {
  Mat rprime(1, 5);
  rprime << 0.3, -1.0, 2.0, 0.0, 0.7;
  Mat shifted = rprime.array() + 123.0;
  const double a = objective::entropy_loss_nll(rprime, {{2, 4}}, nullptr);
  const double b = objective::entropy_loss_nll(shifted, {{2, 4}}, nullptr);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("helmholtz: total = energy + temperature * entropy within 1e-10") {
  Mat target(2, 5), rprime(2, 5);
  target << 0.5, 0.5, 0, 0, 0, 0, 0, 1, 0, 0;
  rprime << 0.4, 0.1, 0.2, 0.2, 0.1, 0.05, 0.15, 0.6, 0.1, 0.1;
  const IndexRows pos = {{0, 1}, {2}};
  const IndexRows neg = {{2, 3}, {4}};
  for (double temp : {0.1, 1.0, 5.0, 15.0}) {
    objective::ObjectiveConfig cfg;
    cfg.temperature_H = temp;
    Mat grad;
    const auto breakdown =
        objective::helmholtz_loss(cfg, target, rprime, pos, neg, &grad);
    CHECK(std::abs(breakdown.total -
                   (breakdown.energy_term + temp * breakdown.entropy_term)) <=
          1e-10);
    // The pieces match the standalone functions.
    Mat g0 = Mat::Zero(2, 5);
    const double e = objective::energy_loss(target, rprime, &g0);
    const double s = objective::entropy_loss_bce(target, rprime, pos, neg,
                                                 cfg.bce_label_mode, false, &g0,
                                                 temp);
    CHECK(breakdown.energy_term == doctest::Approx(e).epsilon(1e-14));
    CHECK(breakdown.entropy_term == doctest::Approx(s).epsilon(1e-14));
    CHECK((grad - g0).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("helmholtz none variant is pure energy") {
  Mat target(1, 4), rprime(1, 4);
  target << 1, 0, 0, 0;
  rprime << 0.4, 0.2, 0.2, 0.2;
  objective::ObjectiveConfig cfg;
  cfg.entropy_variant = objective::EntropyVariant::kNone;
  Mat grad;
  const auto b = objective::helmholtz_loss(cfg, target, rprime, {{0}}, {{1}}, &grad);
  CHECK(b.entropy_term == 0.0);
  CHECK(b.total == b.energy_term);
  Mat g0 = Mat::Zero(1, 4);
  objective::energy_loss(target, rprime, &g0);
  CHECK((grad - g0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("helmholtz gradient matches finite differences across variants") {
  Mat target(2, 6), rprime(2, 6);
  target << 0.5, 0.5, 0, 0, 0, 0, 0, 0, 0.5, 0.5, 0, 0;
  rprime << 0.3, -0.2, 0.1, 0.25, -0.15, 0.4, 0.2, 0.1, 0.35, -0.3, 0.05, 0.2;
  const IndexRows pos = {{0, 1}, {2, 3}};
  const IndexRows neg = {{2, 5}, {0, 4}};
  using V = objective::EntropyVariant;
  for (V v : {V::kBCE, V::kBPR, V::kNLL, V::kNone}) {
    objective::ObjectiveConfig cfg;
    cfg.entropy_variant = v;
    cfg.temperature_H = 2.5;
    Mat grad;
    objective::helmholtz_loss(cfg, target, rprime, pos, neg, &grad);
    const double h = 1e-6;
    for (Index r = 0; r < 2; ++r)
      for (Index c = 0; c < 6; ++c) {
        Mat up = rprime, dn = rprime;
        up(r, c) += h;
        dn(r, c) -= h;
        const double fu =
            objective::helmholtz_loss(cfg, target, up, pos, neg, nullptr).total;
        const double fd =
            objective::helmholtz_loss(cfg, target, dn, pos, neg, nullptr).total;
        const double want = (fu - fd) / (2.0 * h);
        CHECK(grad(r, c) == doctest::Approx(want).epsilon(5e-5));
      }
  }
}

TEST_CASE("temperature must be positive") {
  objective::ObjectiveConfig cfg;
  cfg.temperature_H = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
}

}  // TEST_SUITE
