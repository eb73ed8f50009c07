#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <thread>
#include <vector>

#include "tvdiff/rng.hpp"
#include "common.hpp"
#include "commands.hpp"

namespace tvdiff::cli {

namespace {

const std::vector<std::string> kSweepKeys = {"temperature", "gamma", "T",
                                             "s",           "beta_min", "beta_max"};

struct SweepOpts {
  std::string data;
  std::string out = ".";
  std::vector<std::string> grids;  // "key=v1,v2,..."
  int max_cells = 64;
  int jobs = 1;
  std::string mode = "trajectory";
  ConfigCli cfg;
  bool force = false;
};

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

std::vector<GridAxis> parse_grids(const std::vector<std::string>& specs) {
  std::vector<GridAxis> axes;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--grid expects key=v1,v2,... got '" + spec + "'");
    GridAxis axis;
    axis.key = spec.substr(0, eq);
    if (std::find(kSweepKeys.begin(), kSweepKeys.end(), axis.key) ==
        kSweepKeys.end()) {
      std::string allowed;
      for (const auto& k : kSweepKeys) allowed += (allowed.empty() ? "" : ", ") + k;
      throw std::runtime_error("cannot sweep '" + axis.key + "' (allowed: " +
                               allowed + ")");
    }
    for (auto rest = spec.substr(eq + 1); !rest.empty();) {
      const auto comma = rest.find(',');
      axis.values.push_back(rest.substr(0, comma));
      if (comma == std::string::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (axis.values.empty())
      throw std::runtime_error("--grid axis '" + axis.key + "' has no values");
    for (const auto& other : axes)
      if (other.key == axis.key)
        throw std::runtime_error("--grid axis '" + axis.key + "' given twice");
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw std::runtime_error("sweep needs at least one --grid");
  return axes;
}

struct CellResult {
  std::vector<std::string> values;
  int best_epoch = 0;
  double r10 = 0.0, n10 = 0.0, r20 = 0.0, n20 = 0.0;
  double seconds = 0.0;
  std::string fingerprint;
};

void run_sweep(const SweepOpts& o) {
  const auto base = assemble_config(o.cfg);
  {
    auto probe = base;
    probe.erase("data");
    if (const auto it = probe.find("model");
        it != probe.end() && it->second != "tv-diff")
      throw std::runtime_error("sweep supports model tv-diff only");
  }
  const auto axes = parse_grids(o.grids);

  std::size_t cells = 1;
  for (const auto& a : axes) cells *= a.values.size();
  if (cells > static_cast<std::size_t>(o.max_cells))
    throw std::runtime_error("refusing to run " + std::to_string(cells) +
                             " cells (budget " + std::to_string(o.max_cells) +
                             "; raise --max-cells)");

  const auto ds = dataset::load_split(o.data);
  const auto mats = dataset::build_matrices(ds);
  const auto mode =
      o.mode == "single" ? EvalMode::kSingle : EvalMode::kTrajectory;

  std::vector<CellResult> results(cells);
  std::atomic<std::size_t> next{0};
  const int jobs = std::max(1, o.jobs);

  const auto worker = [&]() {
    for (std::size_t cell = next.fetch_add(1); cell < cells;
         cell = next.fetch_add(1)) {
      auto map = base;
      map.erase("data");
      map.erase("model");
      CellResult& res = results[cell];
      std::size_t rem = cell;
      for (const auto& a : axes) {
        const std::string& v = a.values[rem % a.values.size()];
        rem /= a.values.size();
        map[a.key] = v;
        res.values.push_back(v);
      }
      auto cfg = config::build_train_config(map);
      cfg.validate();
      res.fingerprint = config::fingerprint(config::effective_train_map(map, "tv-diff"));

      const auto start = std::chrono::steady_clock::now();
      const auto trained = trainer::train(ds, cfg);
      const auto sch =
          diffusion::build_schedule(cfg.T, cfg.s, cfg.beta_min, cfg.beta_max);
      Rng rng = Rng::derive(cfg.seed, Stream::kEval);
      const auto scorer =
          make_denoiser_scorer(trained.params, mats, sch,
                               cfg.objective.target_mode, mode,
                               &ds.train_items, &rng);
      const auto metrics =
          evalrank::evaluate(scorer, ds.m, ds.train_items, ds.test_items, {10, 20});
      res.best_epoch = trained.best_epoch;
      res.r10 = metrics.at_k(10).recall;
      res.n10 = metrics.at_k(10).ndcg;
      res.r20 = metrics.at_k(20).recall;
      res.n20 = metrics.at_k(20).ndcg;
      res.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    }
  };

  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::string header = "cell";
  for (const auto& a : axes) header += "," + a.key;
  header += ",best_epoch,recall@10,ndcg@10,recall@20,ndcg@20,seconds,fingerprint";
  namespace fs = std::filesystem;
  const std::string path = (fs::path(o.out) / "sweep.csv").string();
  auto base_fp = base;
  base_fp.erase("data");
  base_fp.erase("model");
  auto csv = open_csv(path, config::fingerprint(config::effective_train_map(
                                base_fp, "tv-diff")),
                      header, o.force);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const auto& r = results[cell];
    csv << cell;
    for (const auto& v : r.values) csv << ',' << v;
    csv << ',' << r.best_epoch << ',' << fmt(r.r10) << ',' << fmt(r.n10) << ','
        << fmt(r.r20) << ',' << fmt(r.n20) << ',' << fmt(r.seconds) << ','
        << r.fingerprint << "\n";
  }
  std::cout << cells << " cells -> " << path << "\n";
}

}  // namespace

void register_sweep(CLI::App& app) {
  auto opts = std::make_shared<SweepOpts>();
  auto* cmd = app.add_subcommand(
      "sweep", "Train/eval a cartesian hyperparameter grid, one CSV row per cell");
  cmd->add_option("--data", opts->data, "prepared split directory")->required();
  cmd->add_option("--out", opts->out, "output directory");
  cmd->add_option("--grid", opts->grids, "axis spec key=v1,v2,... (repeatable)")
      ->required()
      ->take_all();
  cmd->add_option("--max-cells", opts->max_cells, "refusal budget");
  cmd->add_option("--jobs", opts->jobs, "concurrent cells");
  cmd->add_option("--mode", opts->mode, "evaluation scoring mode")
      ->check(CLI::IsMember({"trajectory", "single"}));
  cmd->add_option("--config", opts->cfg.config_path, "flat key=value config file");
  cmd->add_option("--set", opts->cfg.sets, "base override, e.g. --set lr=0.002")
      ->take_all();
  auto* seed_opt = cmd->add_option("--seed", opts->cfg.seed, "seed");
  cmd->add_flag("--force", opts->force, "overwrite existing outputs");
  cmd->callback([opts, seed_opt]() {
    opts->cfg.seed_given = seed_opt->count() > 0;
    run_sweep(*opts);
  });
}

}  // namespace tvdiff::cli
