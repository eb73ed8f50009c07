#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>

#include "tvdiff/checkpoint.hpp"
#include "tvdiff/rng.hpp"
#include "common.hpp"
#include "commands.hpp"

namespace tvdiff::cli {

namespace {

struct EvalOpts {
  std::string checkpoint;
  std::string data;
  std::string out = ".";
  std::vector<int> ks = {10, 20};
  std::string mode = "trajectory";
  ConfigCli cfg;
  bool force = false;
};

void check_dims(Index have_m, Index have_n, Index want_m, Index want_n) {
  if (have_m != want_m || have_n != want_n)
    throw std::runtime_error("checkpoint shape (" + std::to_string(have_m) + "x" +
                             std::to_string(have_n) + ") does not match dataset (" +
                             std::to_string(want_m) + "x" + std::to_string(want_n) +
                             ")");
}

void run_eval(const EvalOpts& o) {
  auto map = assemble_config(o.cfg);
  map.erase("data");
  map.erase("model");

  const auto ds = dataset::load_split(o.data);
  const auto mats = dataset::build_matrices(ds);
  const auto kind = checkpoint::peek_kind(o.checkpoint);

  std::string model;
  evalrank::RankingResult res;
  std::string fp;
  if (kind == checkpoint::kKindDenoiser) {
    model = "tv-diff";
    const auto params = checkpoint::load_denoiser(o.checkpoint);
    check_dims(params.m, params.n, ds.m, ds.n);
    auto cfg = config::build_train_config(map);
    if (cfg.T != params.T) {
      // The checkpoint's embedding table fixes T; the config only shapes beta.
      map["T"] = std::to_string(params.T);
      cfg = config::build_train_config(map);
    }
    cfg.validate();
    fp = config::fingerprint(config::effective_train_map(map, model));
    const auto sch =
        diffusion::build_schedule(cfg.T, cfg.s, cfg.beta_min, cfg.beta_max);
    Rng rng = Rng::derive(cfg.seed, Stream::kEval);
    const auto mode =
        o.mode == "single" ? EvalMode::kSingle : EvalMode::kTrajectory;
    const auto scorer =
        make_denoiser_scorer(params, mats, sch, cfg.objective.target_mode, mode,
                             &ds.train_items, &rng);
    res = evalrank::evaluate(scorer, ds.m, ds.train_items, ds.test_items, o.ks);
  } else {
    model = "bpr-mf";
    const auto params = checkpoint::load_bpr_mf(o.checkpoint);
    check_dims(params.E_U.rows(), params.E_I.rows(), ds.m, ds.n);
    const auto cfg = config::build_bpr_config(map);
    cfg.validate();
    fp = config::fingerprint(config::effective_train_map(map, model));
    const auto scorer = make_mf_scorer(params);
    res = evalrank::evaluate(scorer, ds.m, ds.train_items, ds.test_items, o.ks);
  }

  namespace fs = std::filesystem;
  const std::string path = (fs::path(o.out) / "metrics.csv").string();
  auto csv = open_csv(path, fp, "model,K,recall,ndcg,users_evaluated", o.force);
  for (const auto& a : res.aggregates) {
    csv << model << ',' << a.k << ',' << fmt(a.recall) << ',' << fmt(a.ndcg)
        << ',' << a.users_evaluated << "\n";
    std::cout << model << " recall@" << a.k << " = " << a.recall << "  ndcg@"
              << a.k << " = " << a.ndcg << "  (users " << a.users_evaluated
              << ")\n";
  }
  std::cout << "metrics -> " << path << "\n";
}

}  // namespace

void register_eval(CLI::App& app) {
  auto opts = std::make_shared<EvalOpts>();
  auto* cmd =
      app.add_subcommand("eval", "Rank the full catalog and report Recall/NDCG");
  cmd->add_option("--checkpoint", opts->checkpoint, "model checkpoint")
      ->required();
  cmd->add_option("--data", opts->data, "prepared split directory")->required();
  cmd->add_option("--out", opts->out, "output directory");
  cmd->add_option("--ks", opts->ks, "cutoff list")->delimiter(',');
  cmd->add_option("--mode", opts->mode, "tv-diff scoring mode")
      ->check(CLI::IsMember({"trajectory", "single"}));
  cmd->add_option("--config", opts->cfg.config_path,
                  "config file (schedule/target mode for tv-diff)");
  cmd->add_option("--set", opts->cfg.sets, "override, e.g. --set s=0")->take_all();
  auto* seed_opt = cmd->add_option("--seed", opts->cfg.seed, "evaluation seed");
  cmd->add_flag("--force", opts->force, "overwrite existing outputs");
  cmd->callback([opts, seed_opt]() {
    opts->cfg.seed_given = seed_opt->count() > 0;
    run_eval(*opts);
  });
}

}  // namespace tvdiff::cli
