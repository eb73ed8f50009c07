#include "tvdiff/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tvdiff/evalrank.hpp"
#include "tvdiff/optim.hpp"
#include "tvdiff/rng.hpp"

namespace tvdiff::baselines {

void BprConfig::validate() const {
  if (d < 1) throw std::runtime_error("latent size d must be >= 1");
  if (!(lr > 0.0)) throw std::runtime_error("lr must be > 0");
  if (reg < 0.0) throw std::runtime_error("reg must be >= 0");
  if (max_epochs < 1) throw std::runtime_error("max_epochs must be >= 1");
  if (patience < 1) throw std::runtime_error("patience must be >= 1");
  if (batch_pairs < 1) throw std::runtime_error("batch_pairs must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::runtime_error("val_fraction must lie in (0,1)");
  if (monitor != "recall@10" && monitor != "recall@20" &&
      monitor != "ndcg@10" && monitor != "ndcg@20")
    throw std::runtime_error("monitor must be one of recall@{10,20}, ndcg@{10,20}");
}

double mf_score(const MFParams& params, Index u, Index i) {
  return params.E_U.row(u).dot(params.E_I.row(i));
}

namespace {

void fill_xavier(Mat& w, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Index r = 0; r < w.rows(); ++r)
    for (Index c = 0; c < w.cols(); ++c)
      w(r, c) = (2.0 * rng.uniform01() - 1.0) * limit;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct EpochEval {
  double mean_entropy = 0.0;
  double monitor_value = 0.0;
};

// One slab pass computing both the softmax entropy and the validation metric.
EpochEval epoch_eval(const MFParams& params,
                     const dataset::InteractionDataset& core,
                     const IndexRows& val_items, int k, bool want_recall) {
  const Index m = params.E_U.rows();
  constexpr Index kSlab = 512;

  double entropy_sum = 0.0;
  double metric_sum = 0.0;
  Index users_evaluated = 0;

  Mat scores;
  for (Index start = 0; start < m; start += kSlab) {
    const Index len = std::min(kSlab, m - start);
    scores.noalias() = params.E_U.middleRows(start, len) * params.E_I.transpose();

    for (Index b = 0; b < len; ++b) {
      const auto u = static_cast<std::size_t>(start + b);
      const double mx = scores.row(b).maxCoeff();
      Eigen::RowVectorXd p = (scores.row(b).array() - mx).exp();
      p /= p.sum();
      for (Index j = 0; j < p.size(); ++j)
        if (p[j] > 0.0) entropy_sum -= p[j] * std::log(p[j]);

      if (!val_items[u].empty()) {
        const std::vector<Index> topk =
            evalrank::topk_row(scores.row(b), k, core.train_items[u]);
        metric_sum += want_recall ? evalrank::recall_at_k(topk, val_items[u], k)
                                  : evalrank::ndcg_at_k(topk, val_items[u], k);
        ++users_evaluated;
      }
    }
  }

  EpochEval out;
  out.mean_entropy = entropy_sum / static_cast<double>(m);
  out.monitor_value =
      users_evaluated > 0 ? metric_sum / static_cast<double>(users_evaluated) : 0.0;
  return out;
}

}  // namespace

MFParams init_params(Index m, Index n, Index d, std::uint64_t seed) {
  if (m < 1 || n < 1 || d < 1)
    throw std::runtime_error("init_params needs positive dimensions");
  MFParams params;
  params.E_U.resize(m, d);
  params.E_I.resize(n, d);
  Rng rng = Rng::derive(seed, Stream::kParamInit);
  fill_xavier(params.E_U, rng);
  fill_xavier(params.E_I, rng);
  return params;
}

BprResult train_bpr_mf(const dataset::InteractionDataset& ds,
                       const BprConfig& cfg) {
  cfg.validate();

  std::vector<std::vector<Index>> val_items;
  const dataset::InteractionDataset core =
      dataset::holdout_validation(ds, cfg.val_fraction, cfg.seed, &val_items);

  MFParams params = init_params(core.m, core.n, cfg.d, cfg.seed);

  optim::AdamMoments mom_u = optim::AdamMoments::zeros_like(params.E_U);
  optim::AdamMoments mom_i = optim::AdamMoments::zeros_like(params.E_I);
  long step = 0;

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(core.train_count()));
  for (Index u = 0; u < core.m; ++u)
    for (Index i : core.train_items[static_cast<std::size_t>(u)])
      pairs.emplace_back(u, i);

  const int k = cfg.monitor.ends_with("@10") ? 10 : 20;
  const bool want_recall = cfg.monitor.starts_with("recall");

  BprResult out;
  {
    const EpochEval init = epoch_eval(params, core, val_items, k, want_recall);
    out.initial_mean_entropy = init.mean_entropy;
  }

  MFParams best = params;
  double best_monitor = -1.0;
  double best_entropy = out.initial_mean_entropy;
  int best_epoch = 0;
  int bad_epochs = 0;

  negsampler::NegSamplerConfig neg_cfg;
  neg_cfg.gamma = cfg.gamma;
  neg_cfg.lambda = cfg.lambda;
  neg_cfg.epsilon = cfg.epsilon;
  neg_cfg.strategy = cfg.strategy;

  Mat grad_u(core.m, cfg.d), grad_i(core.n, cfg.d);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto wall_start = std::chrono::steady_clock::now();

    Rng shuffle_rng = Rng::derive(cfg.seed, Stream::kEpochShuffle,
                                  static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(pairs);
    Rng neg_rng = Rng::derive(cfg.seed, Stream::kNegSample,
                              static_cast<std::uint64_t>(epoch));

    double epoch_loss = 0.0;

    for (std::size_t pos = 0; pos < pairs.size();
         pos += static_cast<std::size_t>(cfg.batch_pairs)) {
      const auto batch_end =
          std::min(pos + static_cast<std::size_t>(cfg.batch_pairs), pairs.size());
      grad_u.setZero();
      grad_i.setZero();

      // Draw one negative per pair. Score-based strategies work per batch
      // user (grouped in first-appearance order) on current model scores.
      std::vector<Index> negatives(batch_end - pos);
      if (cfg.strategy == negsampler::Strategy::kRns) {
        for (std::size_t p = pos; p < batch_end; ++p) {
          const auto& train =
              core.train_items[static_cast<std::size_t>(pairs[p].first)];
          Index j;
          do {
            j = static_cast<Index>(
                neg_rng.uniform_below(static_cast<std::uint64_t>(core.n)));
          } while (std::binary_search(train.begin(), train.end(), j));
          negatives[p - pos] = j;
        }
      } else {
        std::vector<Index> batch_users;
        std::map<Index, std::vector<std::size_t>> slots;  // user -> batch offsets
        for (std::size_t p = pos; p < batch_end; ++p) {
          auto [it, inserted] = slots.try_emplace(pairs[p].first);
          if (inserted) batch_users.push_back(pairs[p].first);
          it->second.push_back(p - pos);
        }
        for (Index u : batch_users) {
          Mat row(1, core.n);
          row.noalias() = params.E_U.row(u) * params.E_I.transpose();
          IndexRows pos_row(1), train_row(1);
          const auto& uslots = slots[u];
          for (std::size_t off : uslots)
            pos_row[0].push_back(pairs[pos + off].second);
          train_row[0] = core.train_items[static_cast<std::size_t>(u)];
          const auto draws = negsampler::sample_negatives(
              {u}, pos_row, train_row, row, {1}, neg_cfg, 1, neg_rng);
          for (std::size_t d_idx = 0; d_idx < uslots.size(); ++d_idx)
            negatives[uslots[d_idx]] = draws[d_idx].negative;
        }
      }

      for (std::size_t p = pos; p < batch_end; ++p) {
        const Index u = pairs[p].first;
        const Index i = pairs[p].second;
        const Index j = negatives[p - pos];
        const double x =
            params.E_U.row(u).dot(params.E_I.row(i) - params.E_I.row(j));
        const double sig = sigmoid(x);
        epoch_loss -= std::log(std::max(sig, 1e-12));
        const double g = sig - 1.0;
        grad_u.row(u) += g * (params.E_I.row(i) - params.E_I.row(j));
        grad_i.row(i) += g * params.E_U.row(u);
        grad_i.row(j) -= g * params.E_U.row(u);
      }
      if (!std::isfinite(epoch_loss))
        throw std::runtime_error("bpr-mf diverged (non-finite loss) in epoch " +
                                 std::to_string(epoch));

      ++step;
      optim::adam_update(params.E_U, grad_u, mom_u, step, cfg.lr, cfg.reg);
      optim::adam_update(params.E_I, grad_i, mom_i, step, cfg.lr, cfg.reg);
    }

    const EpochEval ev = epoch_eval(params, core, val_items, k, want_recall);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();
    out.log.push_back({epoch, epoch_loss, ev.mean_entropy, ev.monitor_value, seconds});

    if (ev.monitor_value > best_monitor) {
      best_monitor = ev.monitor_value;
      best = params;
      best_entropy = ev.mean_entropy;
      best_epoch = epoch;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      if (bad_epochs >= cfg.patience) break;
    }
  }

  out.params = std::move(best);
  out.best_epoch = best_epoch;
  out.best_monitor = best_monitor;
  out.final_mean_entropy = best_entropy;
  return out;
}

}  // namespace tvdiff::baselines
