#pragma once

#include <cmath>

#include "tvdiff/types.hpp"

namespace tvdiff::optim {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  Mat m;
  Mat v;

  static AdamMoments zeros_like(const Mat& param) {
    return {Mat::Zero(param.rows(), param.cols()),
            Mat::Zero(param.rows(), param.cols())};
  }
};

// Bias-corrected adaptive-moment step (step counts from 1). The L2 term
// reg * param joins the gradient before the moment updates.
inline void adam_update(Mat& param, const Mat& grad, AdamMoments& mom,
                        long step, double lr, double reg,
                        const AdamParams& ap = {}) {
  const Mat g = grad + reg * param;
  mom.m = ap.beta1 * mom.m + (1.0 - ap.beta1) * g;
  mom.v = ap.beta2 * mom.v + (1.0 - ap.beta2) * g.array().square().matrix();
  const double c1 = 1.0 - std::pow(ap.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(ap.beta2, static_cast<double>(step));
  param.array() -=
      lr * (mom.m.array() / c1) / ((mom.v.array() / c2).sqrt() + ap.eps);
}

}  // namespace tvdiff::optim
