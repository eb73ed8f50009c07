#pragma once

// Flat `key = value` run configuration shared by the CLI tools. Files may
// contain blank lines and `#` comments; later assignments win, which is how
// command-line overrides are layered on top of a file.

#include <map>
#include <string>
#include <vector>

#include "tvdiff/baselines.hpp"
#include "tvdiff/trainer.hpp"

namespace tvdiff::config {

using ConfigMap = std::map<std::string, std::string>;

// Parses a config file; throws std::runtime_error with path:line on malformed
// lines (missing '=', empty key).
ConfigMap parse_file(const std::string& path);

// Parses a single "key=value" token (CLI override); throws on malformed input.
std::pair<std::string, std::string> parse_assignment(const std::string& token);

// String <-> enum helpers; *_from_string throws on unknown names.
objective::EntropyVariant entropy_variant_from_string(const std::string& s);
std::string to_string(objective::EntropyVariant v);
objective::TargetMode target_mode_from_string(const std::string& s);
std::string to_string(objective::TargetMode v);
objective::BceLabelMode bce_label_mode_from_string(const std::string& s);
std::string to_string(objective::BceLabelMode v);
negsampler::Strategy strategy_from_string(const std::string& s);
std::string to_string(negsampler::Strategy v);

// Builds typed configs from a key/value map. Unknown keys and unparsable
// values are collected and reported together in a single exception.
trainer::TrainConfig build_train_config(const ConfigMap& map);
baselines::BprConfig build_bpr_config(const ConfigMap& map);

// Canonical serialization of the effective configuration (sorted key=value,
// one per line) and the FNV-1a 64-bit hex fingerprint of that text. The
// fingerprint is embedded as a comment line in every CSV an invocation
// produces so outputs can be traced back to their exact configuration.
std::string canonical_text(const ConfigMap& map);
std::string fingerprint(const ConfigMap& map);

// The effective map for a train run: defaults overlaid with file + overrides,
// so the fingerprint covers values the user left implicit.
ConfigMap effective_train_map(const ConfigMap& user, const std::string& model);

}  // namespace tvdiff::config
