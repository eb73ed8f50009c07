#include "tvdiff/negsampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvdiff::negsampler {

void NegSamplerConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::runtime_error("gamma must lie in (0,1]");
  if (!(lambda > 0.0)) throw std::runtime_error("lambda must be > 0");
  if (!(epsilon > 0.0)) throw std::runtime_error("epsilon must be > 0");
}

namespace {

// Non-train items in ascending index order (train_items must be sorted).
std::vector<Index> non_train_items(Index n, const std::vector<Index>& train_items) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n) - train_items.size());
  std::size_t k = 0;
  for (Index i = 0; i < n; ++i) {
    if (k < train_items.size() && train_items[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

Index accept_threshold(Index n, double gamma) {
  return static_cast<Index>(std::ceil(gamma * static_cast<double>(n)));
}

}  // namespace

Vec ar_distribution(const Eigen::Ref<const Vec>& scores,
                    const std::vector<Index>& train_items, double gamma,
                    double epsilon) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::runtime_error("gamma must lie in (0,1]");
  const Index n = scores.size();
  std::vector<Index> candidates = non_train_items(n, train_items);
  if (candidates.empty())
    throw std::runtime_error("ar_distribution: user has no candidate negatives");

  const Index g = accept_threshold(n, gamma);
  const auto a = std::min<std::size_t>(static_cast<std::size_t>(g), candidates.size());
  std::sort(candidates.begin(), candidates.end(), [&](Index lhs, Index rhs) {
    if (scores[lhs] != scores[rhs]) return scores[lhs] > scores[rhs];
    return lhs < rhs;
  });

  Vec p = Vec::Zero(n);
  const double accepted_mass = 1.0 / static_cast<double>(g);
  for (std::size_t k = 0; k < candidates.size(); ++k)
    p[candidates[k]] = k < a ? accepted_mass : epsilon;
  p /= p.sum();
  return p;
}

GumbelDraw gumbel_temper(const Eigen::Ref<const Vec>& p_n, int t, int T,
                         double lambda, Rng& rng) {
  if (t < 0 || t > T)
    throw std::runtime_error("gumbel_temper: timestep outside [0,T]");
  const double total = p_n.sum();
  if (!(std::abs(total - 1.0) <= 1e-6))
    throw std::runtime_error("gumbel_temper: p_n is not a distribution");

  GumbelDraw out;
  out.tau = std::exp(-lambda * (1.0 - static_cast<double>(t) / T));

  const Index n = p_n.size();
  Vec logits(n);
  Index best = 0;
  for (Index j = 0; j < n; ++j) {
    const double base =
        p_n[j] > 0.0 ? std::log(p_n[j]) : -std::numeric_limits<double>::infinity();
    logits[j] = base + (p_n[j] > 0.0 ? rng.gumbel() : 0.0);
    if (logits[j] > logits[best]) best = j;
  }
  out.draw = best;

  // Stable tempered softmax; -inf logits (zero-mass items) map to 0.
  const double mx = logits.maxCoeff();
  out.p_hat.resize(n);
  double z = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double e = std::isinf(logits[j]) ? 0.0 : std::exp((logits[j] - mx) / out.tau);
    out.p_hat[j] = e;
    z += e;
  }
  out.p_hat /= z;
  return out;
}

namespace {

struct RowSampler {
  // Scratch reused across batch rows to avoid per-row allocation.
  std::vector<Index> candidates;
  std::vector<double> cumulative;
  Vec softmax;

  void draw_ar(const Eigen::Ref<const Vec>& scores,
               const std::vector<Index>& train, const NegSamplerConfig& cfg,
               const std::vector<Index>& positives, Index user, int t,
               Rng& rng, std::vector<NegativeDraw>* out) {
    const Index n = scores.size();
    candidates = non_train_items(n, train);
    if (candidates.empty())
      throw std::runtime_error("sample_negatives: user has no candidate negatives");

    const Index g = accept_threshold(n, cfg.gamma);
    const auto a =
        std::min<std::size_t>(static_cast<std::size_t>(g), candidates.size());
    const auto cmp = [&](Index lhs, Index rhs) {
      if (scores[lhs] != scores[rhs]) return scores[lhs] > scores[rhs];
      return lhs < rhs;
    };
    if (a < candidates.size())
      std::nth_element(candidates.begin(),
                       candidates.begin() + static_cast<std::ptrdiff_t>(a),
                       candidates.end(), cmp);
    // nth_element leaves both tiers in unspecified internal order; sort the
    // accepted tier (rejected tier lazily) so member picks are reproducible
    // across standard library implementations.
    std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(a));
    bool rejected_sorted = false;

    const std::size_t n_rej = candidates.size() - a;
    const double w_accept = 1.0 / static_cast<double>(g);
    const double z = static_cast<double>(a) * w_accept +
                     static_cast<double>(n_rej) * cfg.epsilon;
    const double p_accept_tier = static_cast<double>(a) * w_accept / z;

    for (Index pos : positives) {
      NegativeDraw d;
      d.user = user;
      d.positive = pos;
      d.timestep = t;
      if (n_rej == 0 || rng.uniform01() < p_accept_tier) {
        d.negative = candidates[rng.uniform_below(a)];
        d.draw_prob = w_accept / z;
      } else {
        if (!rejected_sorted) {
          std::sort(candidates.begin() + static_cast<std::ptrdiff_t>(a),
                    candidates.end());
          rejected_sorted = true;
        }
        d.negative = candidates[a + rng.uniform_below(n_rej)];
        d.draw_prob = cfg.epsilon / z;
      }
      out->push_back(d);
    }
  }

  void draw_rns(Index n, const std::vector<Index>& train,
                const std::vector<Index>& positives, Index user, int t,
                Rng& rng, std::vector<NegativeDraw>* out) {
    if (static_cast<std::size_t>(n) == train.size())
      throw std::runtime_error("sample_negatives: user has no candidate negatives");
    const double prob = 1.0 / static_cast<double>(n - static_cast<Index>(train.size()));
    for (Index pos : positives) {
      Index j;
      do {
        j = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
      } while (std::binary_search(train.begin(), train.end(), j));
      out->push_back({user, pos, j, prob, t});
    }
  }

  void draw_sublinear(const Eigen::Ref<const Vec>& scores,
                      const std::vector<Index>& train,
                      const std::vector<Index>& positives, Index user, int t,
                      Rng& rng, std::vector<NegativeDraw>* out) {
    const Index n = scores.size();
    candidates = non_train_items(n, train);
    if (candidates.empty())
      throw std::runtime_error("sample_negatives: user has no candidate negatives");

    const double mx = scores.maxCoeff();
    softmax = (scores.array() - mx).exp();
    softmax /= softmax.sum();

    cumulative.resize(candidates.size());
    double total = 0.0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      total += std::pow(softmax[candidates[k]], 0.75);
      cumulative[k] = total;
    }

    for (Index pos : positives) {
      const double u = rng.uniform01() * total;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const std::size_t k =
          std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                candidates.size() - 1);
      const double mass = std::pow(softmax[candidates[k]], 0.75) / total;
      out->push_back({user, pos, candidates[k], mass, t});
    }
  }
};

}  // namespace

std::vector<NegativeDraw> sample_negatives(
    const std::vector<Index>& users, const IndexRows& positives,
    const IndexRows& train_items, const Mat& scores, const std::vector<int>& t,
    const NegSamplerConfig& config, int T, Rng& rng) {
  config.validate();
  // T fixes the tempering horizon; the AR draw itself is temperature
  // invariant (argmax of tempered logits), so only t/T validity matters here.
  for (int tb : t)
    if (tb < 0 || tb > T)
      throw std::runtime_error("sample_negatives: timestep out of range");
  const Index B = scores.rows();
  if (static_cast<Index>(users.size()) != B ||
      static_cast<Index>(positives.size()) != B ||
      static_cast<Index>(train_items.size()) != B ||
      static_cast<Index>(t.size()) != B)
    throw std::runtime_error("sample_negatives: per-row inputs disagree with batch");

  std::vector<NegativeDraw> draws;
  std::size_t want = 0;
  for (const auto& p : positives) want += p.size();
  draws.reserve(want);

  RowSampler sampler;
  for (Index b = 0; b < B; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    switch (config.strategy) {
      case Strategy::kArGsp:
        sampler.draw_ar(scores.row(b).transpose(), train_items[bi], config,
                        positives[bi], users[bi], t[bi], rng, &draws);
        break;
      case Strategy::kRns:
        sampler.draw_rns(scores.cols(), train_items[bi], positives[bi],
                         users[bi], t[bi], rng, &draws);
        break;
      case Strategy::kSublinear:
        sampler.draw_sublinear(scores.row(b).transpose(), train_items[bi],
                               positives[bi], users[bi], t[bi], rng, &draws);
        break;
    }
  }
  return draws;
}

}  // namespace tvdiff::negsampler
