#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>

#include "tvdiff/checkpoint.hpp"
#include "common.hpp"
#include "commands.hpp"

namespace tvdiff::cli {

namespace {

struct TrainOpts {
  std::string model;  // empty -> config "model" key -> tv-diff
  std::string data;
  std::string out = ".";
  std::string entropy_variant;
  std::string neg_strategy;
  ConfigCli cfg;
  bool force = false;
};

// Pulls tool-level keys (currently just the dataset path) out of the map so
// model config building sees only model keys.
std::string take_data_path(config::ConfigMap& map, const std::string& flag) {
  std::string path = flag;
  if (const auto it = map.find("data"); it != map.end()) {
    if (path.empty()) path = it->second;
    map.erase(it);
  }
  if (path.empty())
    throw std::runtime_error("no dataset given (--data or config key 'data')");
  return path;
}

std::string resolve_model(const config::ConfigMap& map, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const auto it = map.find("model"); it != map.end()) return it->second;
  return "tv-diff";
}

void write_effective_config(const std::string& path, const config::ConfigMap& eff,
                            bool force) {
  require_absent_or_force(path, force);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "# fingerprint=" << config::fingerprint(eff) << "\n"
      << config::canonical_text(eff);
}

void run_train(const TrainOpts& o) {
  auto map = assemble_config(o.cfg);
  if (!o.entropy_variant.empty()) map["entropy_variant"] = o.entropy_variant;
  if (!o.neg_strategy.empty()) map["neg_strategy"] = o.neg_strategy;
  const std::string data = take_data_path(map, o.data);
  const std::string model = resolve_model(map, o.model);
  map.erase("model");

  const auto eff = config::effective_train_map(map, model);
  const std::string fp = config::fingerprint(eff);

  namespace fs = std::filesystem;
  fs::create_directories(o.out);
  const std::string ckpt_path = (fs::path(o.out) / "checkpoint.bin").string();
  const std::string log_path = (fs::path(o.out) / "train_log.csv").string();
  const std::string eff_path = (fs::path(o.out) / "effective.cfg").string();
  require_absent_or_force(ckpt_path, o.force);

  const auto ds = dataset::load_split(data);
  std::cout << "loaded " << data << ": m=" << ds.m << " n=" << ds.n
            << " train=" << ds.train_count() << " test=" << ds.test_count()
            << "\n";

  if (model == "tv-diff") {
    auto cfg = config::build_train_config(map);
    cfg.validate();
    const auto res = trainer::train(ds, cfg);
    checkpoint::save_denoiser(ckpt_path, res.params);
    auto log = open_csv(log_path, fp,
                        "epoch,loss,energy_term,entropy_term,monitor_value,seconds",
                        o.force);
    for (const auto& e : res.log)
      log << e.epoch << ',' << fmt(e.loss) << ',' << fmt(e.energy_term) << ','
          << fmt(e.entropy_term) << ',' << fmt(e.monitor_value) << ','
          << fmt(e.seconds) << "\n";
    write_effective_config(eff_path, eff, o.force);
    std::cout << "best epoch " << res.best_epoch << " (" << cfg.monitor << " = "
              << res.best_monitor << "); checkpoint -> " << ckpt_path << "\n";
  } else if (model == "bpr-mf") {
    auto cfg = config::build_bpr_config(map);
    cfg.validate();
    const auto res = baselines::train_bpr_mf(ds, cfg);
    checkpoint::save_bpr_mf(ckpt_path, res.params);
    auto log = open_csv(log_path, fp,
                        "epoch,loss,mean_user_entropy,monitor_value,seconds",
                        o.force);
    for (const auto& e : res.log)
      log << e.epoch << ',' << fmt(e.loss) << ',' << fmt(e.mean_user_entropy)
          << ',' << fmt(e.monitor_value) << ',' << fmt(e.seconds) << "\n";
    write_effective_config(eff_path, eff, o.force);
    std::cout << "best epoch " << res.best_epoch << " (" << cfg.monitor << " = "
              << res.best_monitor << "); entropy " << res.initial_mean_entropy
              << " -> " << res.final_mean_entropy << "; checkpoint -> "
              << ckpt_path << "\n";
  } else {
    throw std::runtime_error("unknown model '" + model +
                             "' (expected tv-diff|bpr-mf)");
  }
}

}  // namespace

void register_train(CLI::App& app) {
  auto opts = std::make_shared<TrainOpts>();
  auto* cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  cmd->add_option("--model", opts->model, "tv-diff|bpr-mf")
      ->check(CLI::IsMember({"tv-diff", "bpr-mf"}));
  cmd->add_option("--config", opts->cfg.config_path, "flat key=value config file");
  cmd->add_option("--data", opts->data, "prepared split directory");
  cmd->add_option("--out", opts->out, "output directory");
  cmd->add_option("--set", opts->cfg.sets, "override, e.g. --set lr=0.002")
      ->take_all();
  cmd->add_option("--entropy-variant", opts->entropy_variant,
                  "entropy view of the objective")
      ->check(CLI::IsMember({"bce", "bpr", "nll", "none"}));
  cmd->add_option("--neg-strategy", opts->neg_strategy, "negative sampler")
      ->check(CLI::IsMember({"ar-gsp", "rns", "sublinear"}));
  auto* seed_opt = cmd->add_option("--seed", opts->cfg.seed, "training seed");
  cmd->add_flag("--force", opts->force, "overwrite existing outputs");
  cmd->callback([opts, seed_opt]() {
    opts->cfg.seed_given = seed_opt->count() > 0;
    run_train(*opts);
  });
}

}  // namespace tvdiff::cli
