#pragma once

// Binary checkpoint i/o for trained models. The on-disk layout is documented
// in docs/checkpoint_format.md; loads validate the header and fail loudly on
// mismatched magic, version, kind, or truncated payloads.

#include <string>

#include "tvdiff/baselines.hpp"
#include "tvdiff/denoiser.hpp"

namespace tvdiff::checkpoint {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kKindDenoiser = 1;
inline constexpr std::uint32_t kKindBprMf = 2;

void save_denoiser(const std::string& path, const denoiser::DenoiserParams& p);
denoiser::DenoiserParams load_denoiser(const std::string& path);

void save_bpr_mf(const std::string& path, const baselines::MFParams& p);
baselines::MFParams load_bpr_mf(const std::string& path);

// Reads only the kind field so callers can dispatch without loading weights.
std::uint32_t peek_kind(const std::string& path);

}  // namespace tvdiff::checkpoint
