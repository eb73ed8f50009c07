#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "tvdiff/baselines.hpp"
#include "tvdiff/config.hpp"
#include "tvdiff/dataset.hpp"
#include "tvdiff/denoiser.hpp"
#include "tvdiff/diffusion.hpp"
#include "tvdiff/evalrank.hpp"
#include "tvdiff/thermo.hpp"
#include "tvdiff/trainer.hpp"
#include "tvdiff/types.hpp"

namespace tvdiff::cli {

// Seed/override plumbing shared by every subcommand that reads a config.
// Precedence, lowest to highest: config file, TVDIFF_SEED environment
// variable, --set key=value overrides (in order given), --seed flag.
struct ConfigCli {
  std::string config_path;          // optional flat key=value file
  std::vector<std::string> sets;    // raw "key=value" strings
  std::uint64_t seed = 0;
  bool seed_given = false;          // --seed present on the command line
};

config::ConfigMap assemble_config(const ConfigCli& cli);

// Reads TVDIFF_SEED; returns true and writes *seed when set. Malformed
// values raise.
bool env_seed(std::uint64_t* seed);

// Creates parent directories as needed, refuses to overwrite an existing
// file unless force, writes the fingerprint comment and header row.
std::ofstream open_csv(const std::string& path, const std::string& fingerprint,
                       const std::string& header, bool force);

void require_absent_or_force(const std::string& path, bool force);

// Formats a double with shortest round-trip notation (matches the canonical
// config text, keeps CSVs byte-stable).
std::string fmt(double v);

enum class EvalMode { kTrajectory, kSingle };

// Full-catalog slab scorer for a trained denoiser. Trajectory mode runs the
// T-step reverse chain per slab (train items masked to -inf inside); single
// mode is the deterministic one-pass reconstruction (masking left to the
// evaluator).
evalrank::SlabScorer make_denoiser_scorer(
    const denoiser::DenoiserParams& params,
    const dataset::BipartiteMatrices& mats, const diffusion::NoiseSchedule& sch,
    objective::TargetMode target_mode, EvalMode mode,
    const IndexRows* train_items, Rng* rng);

evalrank::SlabScorer make_mf_scorer(const baselines::MFParams& params);

// Aggregate energy/entropy of a reconstruction against the R_hat reference,
// accumulated slab-wise so the dense probability matrix never materializes.
struct ThermoScan {
  double U = 0.0;
  double S = 0.0;
};
ThermoScan thermo_scan(const evalrank::SlabScorer& scorer,
                       const dataset::BipartiteMatrices& mats, Index m,
                       thermo::Genre genre, Index slab_rows = 256);

}  // namespace tvdiff::cli
