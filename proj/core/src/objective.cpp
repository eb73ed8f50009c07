#include "tvdiff/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace tvdiff::objective {

namespace {

constexpr double kLogClamp = 1e-12;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double clamped_log(double v) { return std::log(std::max(v, kLogClamp)); }

void check_rows(const Mat& rprime, const IndexRows& rows, const char* what) {
  if (static_cast<Index>(rows.size()) != rprime.rows())
    throw std::runtime_error(std::string(what) + ": one index list per row required");
}

}  // namespace

void ObjectiveConfig::validate() const {
  if (!(temperature_H > 0.0))
    throw std::runtime_error("temperature must be > 0");
}

double energy_loss(const Mat& target, const Mat& rprime, Mat* grad) {
  if (target.rows() != rprime.rows() || target.cols() != rprime.cols())
    throw std::runtime_error("energy_loss shape mismatch");
  const double value = (target - rprime).array().square().sum();
  if (grad != nullptr) *grad += 2.0 * (rprime - target);
  return value;
}

double entropy_loss_bce(const Mat& target, const Mat& rprime,
                        const IndexRows& positives, const IndexRows& negatives,
                        BceLabelMode label_mode, bool flip_negative_sign,
                        Mat* grad, double grad_scale) {
  check_rows(rprime, positives, "entropy_loss_bce");
  check_rows(rprime, negatives, "entropy_loss_bce");

  double value = 0.0;
  for (Index b = 0; b < rprime.rows(); ++b) {
    for (Index i : positives[static_cast<std::size_t>(b)]) {
      const double label =
          label_mode == BceLabelMode::kBinary ? 1.0 : target(b, i);
      const double sig = sigmoid(rprime(b, i));
      value -= label * clamped_log(sig);
      if (grad != nullptr) (*grad)(b, i) += grad_scale * label * (sig - 1.0);
    }
    // Sampled negatives carry confidence c = 1, all other items c = 0, so the
    // non-interacted sum reduces to the drawn items.
    const double neg_sign = flip_negative_sign ? -1.0 : 1.0;
    for (Index j : negatives[static_cast<std::size_t>(b)]) {
      const double sig = sigmoid(rprime(b, j));
      value -= neg_sign * clamped_log(1.0 - sig);
      if (grad != nullptr) (*grad)(b, j) += grad_scale * neg_sign * sig;
    }
  }
  return value;
}

double entropy_loss_bpr(const Mat& rprime, const IndexRows& positives,
                        const IndexRows& negatives, Mat* grad,
                        double grad_scale) {
  check_rows(rprime, positives, "entropy_loss_bpr");
  check_rows(rprime, negatives, "entropy_loss_bpr");

  double value = 0.0;
  for (Index b = 0; b < rprime.rows(); ++b) {
    const auto& pos = positives[static_cast<std::size_t>(b)];
    const auto& neg = negatives[static_cast<std::size_t>(b)];
    if (pos.size() != neg.size())
      throw std::runtime_error("entropy_loss_bpr: unpaired positives/negatives");
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const double x = rprime(b, pos[k]) - rprime(b, neg[k]);
      const double sig = sigmoid(x);
      value -= clamped_log(sig);
      if (grad != nullptr) {
        (*grad)(b, pos[k]) += grad_scale * (sig - 1.0);
        (*grad)(b, neg[k]) += grad_scale * (1.0 - sig);
      }
    }
  }
  return value;
}

double entropy_loss_nll(const Mat& rprime, const IndexRows& positives,
                        Mat* grad, double grad_scale) {
  check_rows(rprime, positives, "entropy_loss_nll");

  double value = 0.0;
  Eigen::RowVectorXd p(rprime.cols());
  for (Index b = 0; b < rprime.rows(); ++b) {
    const auto& pos = positives[static_cast<std::size_t>(b)];
    if (pos.empty()) continue;

    const double mx = rprime.row(b).maxCoeff();
    p = (rprime.row(b).array() - mx).exp();
    const double z = p.sum();
    p /= z;
    const double lse = mx + std::log(z);

    for (Index i : pos) value += lse - rprime(b, i);
    if (grad != nullptr) {
      const double k = static_cast<double>(pos.size());
      grad->row(b) += grad_scale * k * p;
      for (Index i : pos) (*grad)(b, i) -= grad_scale;
    }
  }
  return value;
}

LossBreakdown helmholtz_loss(const ObjectiveConfig& config, const Mat& target,
                             const Mat& rprime, const IndexRows& positives,
                             const IndexRows& negatives, Mat* grad) {
  config.validate();
  if (grad != nullptr) {
    grad->resize(rprime.rows(), rprime.cols());
    grad->setZero();
  }

  LossBreakdown out;
  out.energy_term = energy_loss(target, rprime, grad);

  const double tH = config.temperature_H;
  switch (config.entropy_variant) {
    case EntropyVariant::kBCE:
      out.entropy_term =
          entropy_loss_bce(target, rprime, positives, negatives,
                           config.bce_label_mode, config.flip_negative_sign,
                           grad, tH);
      break;
    case EntropyVariant::kBPR:
      out.entropy_term = entropy_loss_bpr(rprime, positives, negatives, grad, tH);
      break;
    case EntropyVariant::kNLL:
      out.entropy_term = entropy_loss_nll(rprime, positives, grad, tH);
      break;
    case EntropyVariant::kNone:
      out.entropy_term = 0.0;
      break;
  }
  out.total = out.energy_term + tH * out.entropy_term;
  return out;
}

}  // namespace tvdiff::objective
