#include "tvdiff/config.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tvdiff::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ErrorList {
  std::vector<std::string> errors;

  void add(const std::string& e) { errors.push_back(e); }

  void raise_if_any(const std::string& context) const {
    if (errors.empty()) return;
    std::string msg = context + ":";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::runtime_error(msg);
  }
};

// Typed getters: leave *out untouched (keeping the default) when the key is
// absent; record an error when the value does not parse.
void get_double(const ConfigMap& m, const std::string& key, double* out,
                ErrorList* errs) {
  auto it = m.find(key);
  if (it == m.end()) return;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    *out = v;
  } catch (const std::exception&) {
    errs->add(key + ": expected a number, got '" + it->second + "'");
  }
}

void get_int(const ConfigMap& m, const std::string& key, int* out,
             ErrorList* errs) {
  auto it = m.find(key);
  if (it == m.end()) return;
  try {
    std::size_t used = 0;
    const long v = std::stol(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    *out = static_cast<int>(v);
  } catch (const std::exception&) {
    errs->add(key + ": expected an integer, got '" + it->second + "'");
  }
}

void get_u64(const ConfigMap& m, const std::string& key, std::uint64_t* out,
             ErrorList* errs) {
  auto it = m.find(key);
  if (it == m.end()) return;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    *out = static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    errs->add(key + ": expected an unsigned integer, got '" + it->second + "'");
  }
}

void get_index(const ConfigMap& m, const std::string& key, Index* out,
               ErrorList* errs) {
  int v = static_cast<int>(*out);
  get_int(m, key, &v, errs);
  *out = static_cast<Index>(v);
}

void get_bool(const ConfigMap& m, const std::string& key, bool* out,
              ErrorList* errs) {
  auto it = m.find(key);
  if (it == m.end()) return;
  if (it->second == "true" || it->second == "1")
    *out = true;
  else if (it->second == "false" || it->second == "0")
    *out = false;
  else
    errs->add(key + ": expected true/false, got '" + it->second + "'");
}

void get_string(const ConfigMap& m, const std::string& key, std::string* out) {
  auto it = m.find(key);
  if (it != m.end()) *out = it->second;
}

template <typename Enum>
void get_enum(const ConfigMap& m, const std::string& key,
              Enum (*from_string)(const std::string&), Enum* out,
              ErrorList* errs) {
  auto it = m.find(key);
  if (it == m.end()) return;
  try {
    *out = from_string(it->second);
  } catch (const std::exception& e) {
    errs->add(key + ": " + e.what());
  }
}

const std::vector<std::string>& known_common_keys() {
  static const std::vector<std::string> keys = {
      "model",      "seed",     "d",          "lr",
      "reg",        "max_epochs", "patience", "monitor",
      "val_fraction"};
  return keys;
}

const std::vector<std::string>& known_tvdiff_keys() {
  static const std::vector<std::string> keys = {
      "batch_size",    "T",           "s",
      "beta_min",      "beta_max",    "temperature",
      "entropy_variant", "target_mode", "bce_label_mode",
      "flip_negative_sign", "gamma",  "lambda",
      "epsilon",       "neg_strategy"};
  return keys;
}

const std::vector<std::string>& known_bpr_keys() {
  static const std::vector<std::string> keys = {"batch_pairs", "gamma", "lambda",
                                                "epsilon", "neg_strategy"};
  return keys;
}

void check_known(const ConfigMap& m,
                 const std::vector<const std::vector<std::string>*>& groups,
                 ErrorList* errs) {
  for (const auto& [key, value] : m) {
    (void)value;
    bool found = false;
    for (const auto* g : groups)
      for (const auto& k : *g)
        if (k == key) found = true;
    if (!found) errs->add("unknown config key '" + key + "'");
  }
}

}  // namespace

ConfigMap parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": empty key");
    out[key] = value;
  }
  return out;
}

std::pair<std::string, std::string> parse_assignment(const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || trim(token.substr(0, eq)).empty())
    throw std::runtime_error("expected key=value, got '" + token + "'");
  return {trim(token.substr(0, eq)), trim(token.substr(eq + 1))};
}

objective::EntropyVariant entropy_variant_from_string(const std::string& s) {
  if (s == "bce") return objective::EntropyVariant::kBCE;
  if (s == "bpr") return objective::EntropyVariant::kBPR;
  if (s == "nll") return objective::EntropyVariant::kNLL;
  if (s == "none") return objective::EntropyVariant::kNone;
  throw std::runtime_error("unknown entropy variant '" + s +
                           "' (expected bce|bpr|nll|none)");
}

std::string to_string(objective::EntropyVariant v) {
  switch (v) {
    case objective::EntropyVariant::kBCE: return "bce";
    case objective::EntropyVariant::kBPR: return "bpr";
    case objective::EntropyVariant::kNLL: return "nll";
    case objective::EntropyVariant::kNone: return "none";
  }
  return "?";
}

objective::TargetMode target_mode_from_string(const std::string& s) {
  if (s == "normalized") return objective::TargetMode::kNormalized;
  if (s == "binary") return objective::TargetMode::kBinary;
  throw std::runtime_error("unknown target mode '" + s +
                           "' (expected normalized|binary)");
}

std::string to_string(objective::TargetMode v) {
  return v == objective::TargetMode::kNormalized ? "normalized" : "binary";
}

objective::BceLabelMode bce_label_mode_from_string(const std::string& s) {
  if (s == "binary") return objective::BceLabelMode::kBinary;
  if (s == "normalized") return objective::BceLabelMode::kNormalized;
  throw std::runtime_error("unknown bce label mode '" + s +
                           "' (expected binary|normalized)");
}

std::string to_string(objective::BceLabelMode v) {
  return v == objective::BceLabelMode::kBinary ? "binary" : "normalized";
}

negsampler::Strategy strategy_from_string(const std::string& s) {
  if (s == "ar-gsp") return negsampler::Strategy::kArGsp;
  if (s == "rns") return negsampler::Strategy::kRns;
  if (s == "sublinear") return negsampler::Strategy::kSublinear;
  throw std::runtime_error("unknown negative-sampling strategy '" + s +
                           "' (expected ar-gsp|rns|sublinear)");
}

std::string to_string(negsampler::Strategy v) {
  switch (v) {
    case negsampler::Strategy::kArGsp: return "ar-gsp";
    case negsampler::Strategy::kRns: return "rns";
    case negsampler::Strategy::kSublinear: return "sublinear";
  }
  return "?";
}

trainer::TrainConfig build_train_config(const ConfigMap& map) {
  trainer::TrainConfig cfg;
  ErrorList errs;
  check_known(map, {&known_common_keys(), &known_tvdiff_keys()}, &errs);

  get_u64(map, "seed", &cfg.seed, &errs);
  get_index(map, "d", &cfg.d, &errs);
  get_int(map, "T", &cfg.T, &errs);
  get_double(map, "s", &cfg.s, &errs);
  get_double(map, "beta_min", &cfg.beta_min, &errs);
  get_double(map, "beta_max", &cfg.beta_max, &errs);
  get_int(map, "batch_size", &cfg.batch_size, &errs);
  get_double(map, "lr", &cfg.lr, &errs);
  get_double(map, "reg", &cfg.reg, &errs);
  get_int(map, "max_epochs", &cfg.max_epochs, &errs);
  get_int(map, "patience", &cfg.patience, &errs);
  get_string(map, "monitor", &cfg.monitor);
  get_double(map, "val_fraction", &cfg.val_fraction, &errs);
  get_double(map, "temperature", &cfg.objective.temperature_H, &errs);
  get_enum(map, "entropy_variant", &entropy_variant_from_string,
           &cfg.objective.entropy_variant, &errs);
  get_enum(map, "target_mode", &target_mode_from_string,
           &cfg.objective.target_mode, &errs);
  get_enum(map, "bce_label_mode", &bce_label_mode_from_string,
           &cfg.objective.bce_label_mode, &errs);
  get_bool(map, "flip_negative_sign", &cfg.objective.flip_negative_sign, &errs);
  get_double(map, "gamma", &cfg.sampler.gamma, &errs);
  get_double(map, "lambda", &cfg.sampler.lambda, &errs);
  get_double(map, "epsilon", &cfg.sampler.epsilon, &errs);
  get_enum(map, "neg_strategy", &strategy_from_string, &cfg.sampler.strategy,
           &errs);

  errs.raise_if_any("invalid configuration");
  cfg.validate();
  return cfg;
}

baselines::BprConfig build_bpr_config(const ConfigMap& map) {
  baselines::BprConfig cfg;
  ErrorList errs;
  check_known(map, {&known_common_keys(), &known_bpr_keys()}, &errs);

  get_u64(map, "seed", &cfg.seed, &errs);
  get_index(map, "d", &cfg.d, &errs);
  get_double(map, "lr", &cfg.lr, &errs);
  get_double(map, "reg", &cfg.reg, &errs);
  get_int(map, "max_epochs", &cfg.max_epochs, &errs);
  get_int(map, "patience", &cfg.patience, &errs);
  get_int(map, "batch_pairs", &cfg.batch_pairs, &errs);
  get_string(map, "monitor", &cfg.monitor);
  get_double(map, "val_fraction", &cfg.val_fraction, &errs);
  get_double(map, "gamma", &cfg.gamma, &errs);
  get_double(map, "lambda", &cfg.lambda, &errs);
  get_double(map, "epsilon", &cfg.epsilon, &errs);
  get_enum(map, "neg_strategy", &strategy_from_string, &cfg.strategy, &errs);

  errs.raise_if_any("invalid configuration");
  cfg.validate();
  return cfg;
}

std::string canonical_text(const ConfigMap& map) {
  std::ostringstream os;
  for (const auto& [k, v] : map) os << k << "=" << v << "\n";
  return os.str();
}

std::string fingerprint(const ConfigMap& map) {
  const std::string text = canonical_text(map);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64-bit offset basis
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

// Shortest round-trip decimal form, so the canonical text is both stable and
// identical to what a user would naturally write ("0.005", not
// "0.0050000000000000001").
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ConfigMap effective_train_map(const ConfigMap& user, const std::string& model) {
  ConfigMap out;
  out["model"] = model;
  if (model == "tv-diff") {
    trainer::TrainConfig cfg = build_train_config(user);
    out["seed"] = std::to_string(cfg.seed);
    out["d"] = std::to_string(cfg.d);
    out["T"] = std::to_string(cfg.T);
    out["s"] = format_double(cfg.s);
    out["beta_min"] = format_double(cfg.beta_min);
    out["beta_max"] = format_double(cfg.beta_max);
    out["batch_size"] = std::to_string(cfg.batch_size);
    out["lr"] = format_double(cfg.lr);
    out["reg"] = format_double(cfg.reg);
    out["max_epochs"] = std::to_string(cfg.max_epochs);
    out["patience"] = std::to_string(cfg.patience);
    out["monitor"] = cfg.monitor;
    out["val_fraction"] = format_double(cfg.val_fraction);
    out["temperature"] = format_double(cfg.objective.temperature_H);
    out["entropy_variant"] = to_string(cfg.objective.entropy_variant);
    out["target_mode"] = to_string(cfg.objective.target_mode);
    out["bce_label_mode"] = to_string(cfg.objective.bce_label_mode);
    out["flip_negative_sign"] = cfg.objective.flip_negative_sign ? "true" : "false";
    out["gamma"] = format_double(cfg.sampler.gamma);
    out["lambda"] = format_double(cfg.sampler.lambda);
    out["epsilon"] = format_double(cfg.sampler.epsilon);
    out["neg_strategy"] = to_string(cfg.sampler.strategy);
  } else if (model == "bpr-mf") {
    baselines::BprConfig cfg = build_bpr_config(user);
    out["seed"] = std::to_string(cfg.seed);
    out["d"] = std::to_string(cfg.d);
    out["lr"] = format_double(cfg.lr);
    out["reg"] = format_double(cfg.reg);
    out["max_epochs"] = std::to_string(cfg.max_epochs);
    out["patience"] = std::to_string(cfg.patience);
    out["batch_pairs"] = std::to_string(cfg.batch_pairs);
    out["monitor"] = cfg.monitor;
    out["val_fraction"] = format_double(cfg.val_fraction);
    out["gamma"] = format_double(cfg.gamma);
    out["lambda"] = format_double(cfg.lambda);
    out["epsilon"] = format_double(cfg.epsilon);
    out["neg_strategy"] = to_string(cfg.strategy);
  } else {
    throw std::runtime_error("unknown model '" + model +
                             "' (expected tv-diff|bpr-mf)");
  }
  return out;
}

}  // namespace tvdiff::config
