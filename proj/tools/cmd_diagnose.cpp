#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>
#include <vector>

#include "tvdiff/checkpoint.hpp"
#include "tvdiff/negsampler.hpp"
#include "tvdiff/rng.hpp"
#include "common.hpp"
#include "commands.hpp"

namespace tvdiff::cli {

namespace {

namespace fs = std::filesystem;

struct ThermoOpts {
  std::string checkpoint;
  std::string data;
  std::string out = ".";
  int probe_layers = 0;
  ConfigCli cfg;
  bool force = false;
};

void run_thermo(const ThermoOpts& o) {
  auto map = assemble_config(o.cfg);
  map.erase("data");
  map.erase("model");

  const auto ds = dataset::load_split(o.data);
  const auto mats = dataset::build_matrices(ds);
  const auto kind = checkpoint::peek_kind(o.checkpoint);

  ThermoScan init_scan, final_scan;
  std::string fp;
  if (kind == checkpoint::kKindDenoiser) {
    const auto trained = checkpoint::load_denoiser(o.checkpoint);
    if (trained.m != ds.m || trained.n != ds.n)
      throw std::runtime_error("checkpoint does not match dataset dimensions");
    map["T"] = std::to_string(trained.T);
    auto cfg = config::build_train_config(map);
    cfg.d = trained.d;
    cfg.validate();
    fp = config::fingerprint(config::effective_train_map(map, "tv-diff"));
    const auto sch =
        diffusion::build_schedule(cfg.T, cfg.s, cfg.beta_min, cfg.beta_max);
    const auto initial =
        denoiser::init_params(ds.m, ds.n, cfg.T, cfg.d, cfg.seed);
    const auto scan = [&](const denoiser::DenoiserParams& p) {
      const auto scorer = make_denoiser_scorer(
          p, mats, sch, cfg.objective.target_mode, EvalMode::kSingle, nullptr,
          nullptr);
      return thermo_scan(scorer, mats, ds.m, thermo::Genre::kDiffusionNorm);
    };
    init_scan = scan(initial);
    final_scan = scan(trained);
  } else {
    const auto trained = checkpoint::load_bpr_mf(o.checkpoint);
    if (trained.E_U.rows() != ds.m || trained.E_I.rows() != ds.n)
      throw std::runtime_error("checkpoint does not match dataset dimensions");
    const auto cfg = config::build_bpr_config(map);
    cfg.validate();
    fp = config::fingerprint(config::effective_train_map(map, "bpr-mf"));
    const auto initial =
        baselines::init_params(ds.m, ds.n, trained.E_U.cols(), cfg.seed);
    const auto scan = [&](const baselines::MFParams& p) {
      return thermo_scan(make_mf_scorer(p), mats, ds.m, thermo::Genre::kSoftmax);
    };
    init_scan = scan(initial);
    final_scan = scan(trained);
  }

  const auto reports = thermo::pilot_report(init_scan.U, init_scan.S,
                                            final_scan.U, final_scan.S);
  const std::string path = (fs::path(o.out) / "thermo_report.csv").string();
  auto csv = open_csv(path, fp, "phase,U,S,dU,dS", o.force);
  for (const auto& r : reports) {
    csv << r.phase << ',' << fmt(r.U) << ',' << fmt(r.S) << ',' << fmt(r.dU)
        << ',' << fmt(r.dS) << "\n";
    std::cout << r.phase << ": U=" << r.U << " S=" << r.S << " dU=" << r.dU
              << " dS=" << r.dS << "\n";
  }
  std::cout << "report -> " << path << "\n";

  if (o.probe_layers > 0) {
    const auto series = thermo::multilayer_entropy_probe(mats.R, o.probe_layers);
    const std::string ppath = (fs::path(o.out) / "multilayer.csv").string();
    auto pcsv = open_csv(ppath, fp, "layers,S", o.force);
    for (std::size_t k = 0; k < series.size(); ++k)
      pcsv << (k + 1) << ',' << fmt(series[k]) << "\n";
    std::cout << "multilayer probe -> " << ppath << "\n";
  }
}

struct SamplerOpts {
  std::string checkpoint;
  std::string data;
  std::string out = ".";
  Index user = 0;
  int t = -1;  // -1 -> T
  int draws = 10000;
  ConfigCli cfg;
  bool force = false;
};

void run_sampler(const SamplerOpts& o) {
  auto map = assemble_config(o.cfg);
  map.erase("data");
  map.erase("model");

  const auto ds = dataset::load_split(o.data);
  if (o.user < 0 || o.user >= ds.m)
    throw std::runtime_error("--user out of range");
  if (o.draws < 1) throw std::runtime_error("--draws must be >= 1");
  const auto mats = dataset::build_matrices(ds);
  const auto kind = checkpoint::peek_kind(o.checkpoint);

  Eigen::RowVectorXd row;
  double gamma = 0.0, lambda = 0.0, epsilon = 0.0;
  std::uint64_t seed = 0;
  int T = 1;
  std::string fp;
  if (kind == checkpoint::kKindDenoiser) {
    const auto params = checkpoint::load_denoiser(o.checkpoint);
    if (params.m != ds.m || params.n != ds.n)
      throw std::runtime_error("checkpoint does not match dataset dimensions");
    map["T"] = std::to_string(params.T);
    auto cfg = config::build_train_config(map);
    cfg.d = params.d;
    cfg.validate();
    fp = config::fingerprint(config::effective_train_map(map, "tv-diff"));
    const auto sch =
        diffusion::build_schedule(cfg.T, cfg.s, cfg.beta_min, cfg.beta_max);
    row = trainer::reconstruct_slab(params, mats, sch, cfg.objective.target_mode,
                                    o.user, 1)
              .row(0);
    gamma = cfg.sampler.gamma;
    lambda = cfg.sampler.lambda;
    epsilon = cfg.sampler.epsilon;
    seed = cfg.seed;
    T = cfg.T;
  } else {
    const auto params = checkpoint::load_bpr_mf(o.checkpoint);
    if (params.E_U.rows() != ds.m || params.E_I.rows() != ds.n)
      throw std::runtime_error("checkpoint does not match dataset dimensions");
    const auto cfg = config::build_bpr_config(map);
    cfg.validate();
    fp = config::fingerprint(config::effective_train_map(map, "bpr-mf"));
    row = params.E_U.row(o.user) * params.E_I.transpose();
    gamma = cfg.gamma;
    lambda = cfg.lambda;
    epsilon = cfg.epsilon;
    seed = cfg.seed;
    T = 1;
  }
  const int t = o.t < 0 ? T : o.t;
  if (t < 0 || t > T) throw std::runtime_error("--t outside [0,T]");

  const auto& train = ds.train_items[static_cast<std::size_t>(o.user)];
  const Vec p_n = negsampler::ar_distribution(row.transpose(), train, gamma,
                                              epsilon);
  Rng rng = Rng::derive(seed, Stream::kEval, static_cast<std::uint64_t>(o.user));
  std::vector<long> counts(static_cast<std::size_t>(ds.n), 0);
  Vec p_hat;
  double tau = 1.0;
  for (int i = 0; i < o.draws; ++i) {
    const auto g = negsampler::gumbel_temper(p_n, t, T, lambda, rng);
    ++counts[static_cast<std::size_t>(g.draw)];
    if (i == 0) {
      p_hat = g.p_hat;  // deterministic given p_n and tau
      tau = g.tau;
    }
  }

  const std::string path = (fs::path(o.out) / "sampler_report.csv").string();
  auto csv = open_csv(path, fp, "item,score,p_n,p_hat,empirical_freq,is_train",
                      o.force);
  for (Index i = 0; i < ds.n; ++i) {
    const bool is_train = ds.is_train_positive(o.user, i);
    csv << i << ',' << fmt(row[i]) << ',' << fmt(p_n[i]) << ',' << fmt(p_hat[i])
        << ','
        << fmt(static_cast<double>(counts[static_cast<std::size_t>(i)]) /
               o.draws)
        << ',' << (is_train ? 1 : 0) << "\n";
  }
  std::cout << "user " << o.user << " t=" << t << " tau=" << tau << " draws="
            << o.draws << "; report -> " << path << "\n";
}

}  // namespace

void register_diagnose(CLI::App& app) {
  auto* cmd = app.add_subcommand("diagnose", "Thermodynamic and sampler reports");
  cmd->require_subcommand(1);

  auto topts = std::make_shared<ThermoOpts>();
  auto* th = cmd->add_subcommand(
      "thermo", "Energy/entropy of a checkpoint vs its initialization");
  th->add_option("--checkpoint", topts->checkpoint, "model checkpoint")
      ->required();
  th->add_option("--data", topts->data, "prepared split directory")->required();
  th->add_option("--out", topts->out, "output directory");
  th->add_option("--probe-layers", topts->probe_layers,
                 "also emit a K-layer propagation entropy series");
  th->add_option("--config", topts->cfg.config_path, "flat key=value config file");
  th->add_option("--set", topts->cfg.sets, "override, e.g. --set s=0")
      ->take_all();
  auto* tseed = th->add_option("--seed", topts->cfg.seed, "seed");
  th->add_flag("--force", topts->force, "overwrite existing outputs");
  th->callback([topts, tseed]() {
    topts->cfg.seed_given = tseed->count() > 0;
    run_thermo(*topts);
  });

  auto sopts = std::make_shared<SamplerOpts>();
  auto* sa = cmd->add_subcommand(
      "sampler", "Negative-sampling distribution for one user");
  sa->add_option("--checkpoint", sopts->checkpoint, "model checkpoint")
      ->required();
  sa->add_option("--data", sopts->data, "prepared split directory")->required();
  sa->add_option("--out", sopts->out, "output directory");
  sa->add_option("--user", sopts->user, "user index");
  sa->add_option("--t", sopts->t, "sampler timestep (default: T)");
  sa->add_option("--draws", sopts->draws, "number of Gumbel draws");
  sa->add_option("--config", sopts->cfg.config_path, "flat key=value config file");
  sa->add_option("--set", sopts->cfg.sets, "override, e.g. --set gamma=0.2")
      ->take_all();
  auto* sseed = sa->add_option("--seed", sopts->cfg.seed, "seed");
  sa->add_flag("--force", sopts->force, "overwrite existing outputs");
  sa->callback([sopts, sseed]() {
    sopts->cfg.seed_given = sseed->count() > 0;
    run_sampler(*sopts);
  });
}

}  // namespace tvdiff::cli
