#include "common.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

namespace tvdiff::cli {

namespace fs = std::filesystem;

bool env_seed(std::uint64_t* seed) {
  const char* raw = std::getenv("TVDIFF_SEED");
  if (raw == nullptr || *raw == '\0') return false;
  std::uint64_t v = 0;
  const char* end = raw + std::string(raw).size();
  const auto res = std::from_chars(raw, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::runtime_error(std::string("TVDIFF_SEED is not an unsigned integer: '") +
                             raw + "'");
  *seed = v;
  return true;
}

config::ConfigMap assemble_config(const ConfigCli& cli) {
  config::ConfigMap map;
  if (!cli.config_path.empty()) map = config::parse_file(cli.config_path);
  std::uint64_t env = 0;
  if (env_seed(&env)) map["seed"] = std::to_string(env);
  for (const auto& s : cli.sets) {
    const auto kv = config::parse_assignment(s);
    map[kv.first] = kv.second;
  }
  if (cli.seed_given) map["seed"] = std::to_string(cli.seed);
  return map;
}

void require_absent_or_force(const std::string& path, bool force) {
  if (!force && fs::exists(path))
    throw std::runtime_error("refusing to overwrite existing '" + path +
                             "' (pass --force)");
}

std::ofstream open_csv(const std::string& path, const std::string& fingerprint,
                       const std::string& header, bool force) {
  require_absent_or_force(path, force);
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "# config_fingerprint=" << fingerprint << "\n" << header << "\n";
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

evalrank::SlabScorer make_denoiser_scorer(
    const denoiser::DenoiserParams& params,
    const dataset::BipartiteMatrices& mats, const diffusion::NoiseSchedule& sch,
    objective::TargetMode target_mode, EvalMode mode,
    const IndexRows* train_items, Rng* rng) {
  const SpMat& input =
      target_mode == objective::TargetMode::kBinary ? mats.R : mats.R_hat;
  if (mode == EvalMode::kSingle) {
    return [&params, &mats, &sch, target_mode](Index start, Index len) {
      return trainer::reconstruct_slab(params, mats, sch, target_mode, start, len);
    };
  }
  return [&params, &mats, &sch, &input, train_items, rng](Index start, Index len) {
    const Mat x0 = trainer::dense_rows(input, start, len);
    return diffusion::reverse_trajectory(x0, sch, params, mats.R_bar, *rng,
                                         train_items, start);
  };
}

evalrank::SlabScorer make_mf_scorer(const baselines::MFParams& params) {
  return [&params](Index start, Index len) {
    return Mat(params.E_U.middleRows(start, len) * params.E_I.transpose());
  };
}

ThermoScan thermo_scan(const evalrank::SlabScorer& scorer,
                       const dataset::BipartiteMatrices& mats, Index m,
                       thermo::Genre genre, Index slab_rows) {
  ThermoScan acc;
  for (Index start = 0; start < m; start += slab_rows) {
    const Index len = std::min(slab_rows, m - start);
    const auto p_ref = thermo::normalize_reconstruction(
        trainer::dense_rows(mats.R_hat, start, len), thermo::Genre::kDiffusionNorm);
    const auto p_rec = thermo::normalize_reconstruction(scorer(start, len), genre);
    const SpMat r_slab = mats.R.middleRows(start, len);
    acc.U += thermo::energy(p_rec, p_ref, r_slab);
    acc.S += thermo::entropy(p_rec);
  }
  return acc;
}

}  // namespace tvdiff::cli
