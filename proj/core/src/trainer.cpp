#include "tvdiff/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tvdiff/evalrank.hpp"
#include "tvdiff/optim.hpp"
#include "tvdiff/rng.hpp"

namespace tvdiff::trainer {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::runtime_error("batch_size must be >= 1");
  if (!(lr > 0.0)) throw std::runtime_error("lr must be > 0");
  if (reg < 0.0) throw std::runtime_error("reg must be >= 0");
  if (max_epochs < 1) throw std::runtime_error("max_epochs must be >= 1");
  if (patience < 1) throw std::runtime_error("patience must be >= 1");
  if (d < 1) throw std::runtime_error("latent size d must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::runtime_error("val_fraction must lie in (0,1)");
  if (monitor != "recall@10" && monitor != "recall@20" &&
      monitor != "ndcg@10" && monitor != "ndcg@20")
    throw std::runtime_error("unknown monitor metric: " + monitor);
  if (T < 1) throw std::runtime_error("schedule needs T >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
    throw std::runtime_error("schedule needs 0 < beta_min <= beta_max < 1");
  if (s < 0.0) throw std::runtime_error("noise scale s must be >= 0");
  objective.validate();
  sampler.validate();
}

Mat dense_rows(const SpMat& sp, Index start, Index len) {
  Mat out = Mat::Zero(len, sp.cols());
  for (Index r = 0; r < len; ++r)
    for (SpMat::InnerIterator it(sp, start + r); it; ++it)
      out(r, it.col()) = it.value();
  return out;
}

namespace {

int monitor_k(const std::string& monitor) {
  return monitor.ends_with("@10") ? 10 : 20;
}

double monitor_value(const evalrank::RankingResult& res, const std::string& monitor) {
  const auto& agg = res.at_k(monitor_k(monitor));
  return monitor.starts_with("recall") ? agg.recall : agg.ndcg;
}

}  // namespace

Mat reconstruct_slab(const denoiser::DenoiserParams& params,
                     const dataset::BipartiteMatrices& mats,
                     const diffusion::NoiseSchedule& sch,
                     objective::TargetMode target_mode, Index start, Index len) {
  const SpMat& source =
      target_mode == objective::TargetMode::kNormalized ? mats.R_hat : mats.R;
  Mat x = dense_rows(source, start, len);
  x *= std::sqrt(sch.alpha_bar[1]);
  const std::vector<int> t(static_cast<std::size_t>(len), 1);
  return denoiser::forward(x, t, mats.R_bar, params).normalized;
}

TrainResult train(const dataset::InteractionDataset& ds, const TrainConfig& cfg) {
  cfg.validate();

  // Hold out a slice of each user's train items for the early-stopping
  // monitor; the model — including its graph matrices — only ever sees the
  // remaining core.
  std::vector<std::vector<Index>> val_items;
  const dataset::InteractionDataset core =
      dataset::holdout_validation(ds, cfg.val_fraction, cfg.seed, &val_items);
  const dataset::BipartiteMatrices mats = dataset::build_matrices(core);

  const diffusion::NoiseSchedule sch =
      diffusion::build_schedule(cfg.T, cfg.s, cfg.beta_min, cfg.beta_max);

  denoiser::DenoiserParams params =
      denoiser::init_params(core.m, core.n, cfg.T, cfg.d, cfg.seed);
  optim::AdamMoments mom_wi = optim::AdamMoments::zeros_like(params.W_I);
  optim::AdamMoments mom_wu = optim::AdamMoments::zeros_like(params.W_U);
  optim::AdamMoments mom_et = optim::AdamMoments::zeros_like(params.E_time);
  long step = 0;

  const SpMat& x0_source =
      cfg.objective.target_mode == objective::TargetMode::kNormalized ? mats.R_hat
                                                                      : mats.R;
  const bool needs_negatives =
      cfg.objective.entropy_variant == objective::EntropyVariant::kBCE ||
      cfg.objective.entropy_variant == objective::EntropyVariant::kBPR;

  TrainResult out;
  denoiser::DenoiserParams best = params;
  double best_monitor = -1.0;
  int best_epoch = 0;
  int bad_epochs = 0;

  std::vector<Index> order(static_cast<std::size_t>(core.m));
  std::iota(order.begin(), order.end(), Index{0});

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto wall_start = std::chrono::steady_clock::now();

    Rng shuffle_rng = Rng::derive(cfg.seed, Stream::kEpochShuffle,
                                  static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    Rng corrupt_rng =
        Rng::derive(cfg.seed, Stream::kCorrupt, static_cast<std::uint64_t>(epoch));
    Rng neg_rng = Rng::derive(cfg.seed, Stream::kNegSample,
                              static_cast<std::uint64_t>(epoch));

    double epoch_loss = 0.0, epoch_energy = 0.0, epoch_entropy = 0.0;

    for (std::size_t pos = 0; pos < order.size(); pos += static_cast<std::size_t>(cfg.batch_size)) {
      const auto batch_end =
          std::min(pos + static_cast<std::size_t>(cfg.batch_size), order.size());
      const auto B = static_cast<Index>(batch_end - pos);

      std::vector<Index> users(order.begin() + static_cast<std::ptrdiff_t>(pos),
                               order.begin() + static_cast<std::ptrdiff_t>(batch_end));
      Mat x0 = Mat::Zero(B, core.n);
      IndexRows positives(static_cast<std::size_t>(B));
      for (Index b = 0; b < B; ++b) {
        const Index u = users[static_cast<std::size_t>(b)];
        for (SpMat::InnerIterator it(x0_source, u); it; ++it)
          x0(b, it.col()) = it.value();
        positives[static_cast<std::size_t>(b)] =
            core.train_items[static_cast<std::size_t>(u)];
      }

      std::vector<int> t(static_cast<std::size_t>(B));
      for (auto& tb : t)
        tb = 1 + static_cast<int>(corrupt_rng.uniform_below(
                 static_cast<std::uint64_t>(cfg.T)));

      const Mat xt = diffusion::forward_sample_batch(x0, t, sch, corrupt_rng);
      denoiser::ForwardResult fwd = denoiser::forward(xt, t, mats.R_bar, params);

      IndexRows negatives(static_cast<std::size_t>(B));
      if (needs_negatives) {
        // Each user's positives double as the exclusion set: every train
        // positive gets exactly one paired negative.
        const std::vector<negsampler::NegativeDraw> draws =
            negsampler::sample_negatives(users, positives, positives,
                                         fwd.normalized, t, cfg.sampler, cfg.T,
                                         neg_rng);
        std::size_t cursor = 0;
        for (Index b = 0; b < B; ++b) {
          auto& neg_row = negatives[static_cast<std::size_t>(b)];
          neg_row.reserve(positives[static_cast<std::size_t>(b)].size());
          for (std::size_t k = 0; k < positives[static_cast<std::size_t>(b)].size(); ++k)
            neg_row.push_back(draws[cursor++].negative);
        }
      }

      Mat grad;
      const objective::LossBreakdown bd = objective::helmholtz_loss(
          cfg.objective, x0, fwd.normalized, positives, negatives, &grad);
      if (!std::isfinite(bd.total))
        throw std::runtime_error("non-finite loss in epoch " +
                                 std::to_string(epoch) + ", batch starting at row " +
                                 std::to_string(pos));

      const denoiser::DenoiserGrads grads =
          denoiser::backward(fwd, grad, params, xt, mats.R_bar);

      ++step;
      optim::adam_update(params.W_I, grads.W_I, mom_wi, step, cfg.lr, cfg.reg);
      optim::adam_update(params.W_U, grads.W_U, mom_wu, step, cfg.lr, cfg.reg);
      optim::adam_update(params.E_time, grads.E_time, mom_et, step, cfg.lr, cfg.reg);

      epoch_loss += bd.total;
      epoch_energy += bd.energy_term;
      epoch_entropy += bd.entropy_term;
    }

    // Monitor: rank the held-out items with a deterministic reconstruction.
    const evalrank::RankingResult val = evalrank::evaluate(
        [&](Index start, Index len) {
          return reconstruct_slab(params, mats, sch, cfg.objective.target_mode,
                                  start, len);
        },
        core.m, core.train_items, val_items, {monitor_k(cfg.monitor)});
    const double mval = monitor_value(val, cfg.monitor);

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();
    out.log.push_back({epoch, epoch_loss, epoch_energy, epoch_entropy, mval, seconds});

    if (mval > best_monitor) {
      best_monitor = mval;
      best = params;
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
  return out;
}

}  // namespace tvdiff::trainer
