#pragma once

#include <vector>

#include "tvdiff/rng.hpp"
#include "tvdiff/types.hpp"

namespace tvdiff::negsampler {

enum class Strategy { kArGsp, kRns, kSublinear };

struct NegSamplerConfig {
  double gamma = 0.05;    // negative factor: acceptance threshold ceil(gamma*n)
  double lambda = 3.0;    // relaxation rate of the temperature schedule
  double epsilon = 1e-10; // residual mass on rejected items
  Strategy strategy = Strategy::kArGsp;

  void validate() const;
};

struct NegativeDraw {
  Index user = 0;
  Index positive = 0;
  Index negative = 0;     // never a train item of `user`
  double draw_prob = 0.0; // mass of `negative` under the sampling distribution
  int timestep = 0;
};

// Acceptance-rejection distribution over items: rank non-train items by
// descending score (ties by ascending index); the top ceil(gamma*n) carry mass
// 1/ceil(gamma*n), the rest epsilon, train items 0; renormalized to sum 1.
Vec ar_distribution(const Eigen::Ref<const Vec>& scores,
                    const std::vector<Index>& train_items, double gamma,
                    double epsilon = 1e-10);

// Timestep-tempered Gumbel softmax over a base distribution p_n:
//   tau = exp(-lambda * (1 - t/T)),  logits_j = log p_n(j) + g_j,
//   p_hat = softmax(logits / tau),   draw = argmax_j logits.
// The argmax is invariant to tau, so draws follow p_n exactly; p_hat is the
// reported diagnostic. t may be 0 (fully annealed temperature).
struct GumbelDraw {
  Vec p_hat;
  Index draw = 0;
  double tau = 1.0;
};
GumbelDraw gumbel_temper(const Eigen::Ref<const Vec>& p_n, int t, int T,
                         double lambda, Rng& rng);

// One negative per (user, positive) pair. AR_GSP draws from the two-level
// acceptance-rejection distribution (grouped Gumbel-max: uniform inside the
// accepted and rejected tiers, which is distribution-identical to perturbing
// every item and taking the argmax, at O(1) per draw); RNS is uniform over
// non-train items; SUBLINEAR draws proportionally to softmax(scores)^0.75.
// draw_prob records the item's mass under the draw distribution p_n.
std::vector<NegativeDraw> sample_negatives(
    const std::vector<Index>& users, const IndexRows& positives,
    const IndexRows& train_items, const Mat& scores, const std::vector<int>& t,
    const NegSamplerConfig& config, int T, Rng& rng);

}  // namespace tvdiff::negsampler
