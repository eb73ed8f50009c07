#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "commands.hpp"

namespace tvdiff::cli {

namespace {

struct PrepareOpts {
  std::string input;
  std::string format = "auto";
  std::string out;
  double ratio = 0.8;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool force = false;
};

// Field count of the first data line decides between the two-column pair
// format and the three-column rated format.
dataset::TsvFormat sniff_format(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tabs = std::count(line.begin(), line.end(), '\t');
    if (tabs == 1) return dataset::TsvFormat::kPair;
    if (tabs == 2) return dataset::TsvFormat::kRated;
    throw std::runtime_error(path + ": cannot infer format from " +
                             std::to_string(tabs + 1) + " fields");
  }
  throw std::runtime_error(path + ": no data lines");
}

void run_prepare(const PrepareOpts& o) {
  std::uint64_t seed = o.seed;
  if (!o.seed_given) env_seed(&seed);  // env overrides the default, flag wins
  const auto format = o.format == "auto"  ? sniff_format(o.input)
                      : o.format == "rated" ? dataset::TsvFormat::kRated
                                            : dataset::TsvFormat::kPair;
  const auto records = dataset::load_interactions(o.input, format);
  const auto ds = dataset::split_dataset(records, o.ratio, seed);
  dataset::save_split(ds, o.out, o.ratio, seed, o.force);
  std::cout << "prepared " << o.out << ": m=" << ds.m << " n=" << ds.n
            << " train=" << ds.train_count() << " test=" << ds.test_count()
            << " ratio=" << o.ratio << " seed=" << seed << "\n";
}

}  // namespace

void register_prepare(CLI::App& app) {
  auto opts = std::make_shared<PrepareOpts>();
  auto* cmd = app.add_subcommand(
      "prepare", "Split a raw interaction TSV into train/test artifacts");
  cmd->add_option("--input", opts->input, "raw TSV (user<TAB>item[<TAB>rating])")
      ->required();
  cmd->add_option("--format", opts->format, "input format")
      ->check(CLI::IsMember({"auto", "pair", "rated"}));
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--ratio", opts->ratio, "per-user train fraction")
      ->check(CLI::Range(0.0, 1.0));
  auto* seed_opt = cmd->add_option("--seed", opts->seed, "split seed");
  cmd->add_flag("--force", opts->force, "overwrite existing outputs");
  cmd->callback([opts, seed_opt]() {
    opts->seed_given = seed_opt->count() > 0;
    run_prepare(*opts);
  });
}

}  // namespace tvdiff::cli
