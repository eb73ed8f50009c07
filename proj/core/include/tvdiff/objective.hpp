#pragma once

#include <vector>

#include "tvdiff/types.hpp"

namespace tvdiff::objective {

enum class EntropyVariant { kBCE, kBPR, kNLL, kNone };
enum class TargetMode { kNormalized, kBinary };
// Label fed to the BCE positive term: the binary interaction (default) or the
// normalized target probability (which scales positive terms by 1/d_u).
enum class BceLabelMode { kBinary, kNormalized };

struct ObjectiveConfig {
  double temperature_H = 1.0;  // Helmholtz balance coefficient, > 0
  EntropyVariant entropy_variant = EntropyVariant::kBCE;
  TargetMode target_mode = TargetMode::kNormalized;
  BceLabelMode bce_label_mode = BceLabelMode::kBinary;
  // Escape hatch: flip the sign of the sampled-negative BCE term so that the
  // entropy part rewards, rather than penalizes, confident negatives.
  bool flip_negative_sign = false;

  void validate() const;
};

struct LossBreakdown {
  double energy_term = 0.0;
  double entropy_term = 0.0;
  double total = 0.0;  // energy_term + temperature_H * entropy_term
};

// Sum of squared reconstruction errors; gradient 2 (r' - r) accumulated into
// grad (which must be pre-sized B x n; all ops add, never overwrite).
double energy_loss(const Mat& target, const Mat& rprime, Mat* grad);

// -sum [ label * log sigmoid(r') + (1-label) * log(1-sigmoid(r')) ] over the
// positives of each row plus its sampled negatives; logs clamped at 1e-12.
// Gradients are accumulated scaled by grad_scale (the returned value is not),
// which lets helmholtz_loss apply the temperature without a scratch matrix.
double entropy_loss_bce(const Mat& target, const Mat& rprime,
                        const IndexRows& positives, const IndexRows& negatives,
                        BceLabelMode label_mode, bool flip_negative_sign,
                        Mat* grad, double grad_scale = 1.0);

// Pairwise -log sigmoid(r'_pos - r'_neg); positives[b][k] pairs with
// negatives[b][k], so both lists must have equal lengths per row.
double entropy_loss_bpr(const Mat& rprime, const IndexRows& positives,
                        const IndexRows& negatives, Mat* grad,
                        double grad_scale = 1.0);

// -log softmax_row(r')[pos] summed over all positives (row-wise softmax over
// all n items, computed with a stable log-sum-exp).
double entropy_loss_nll(const Mat& rprime, const IndexRows& positives,
                        Mat* grad, double grad_scale = 1.0);

// total = energy + temperature_H * (selected entropy variant); returns the
// gradient with respect to rprime in *grad (overwritten).
LossBreakdown helmholtz_loss(const ObjectiveConfig& config, const Mat& target,
                             const Mat& rprime, const IndexRows& positives,
                             const IndexRows& negatives, Mat* grad);

}  // namespace tvdiff::objective
