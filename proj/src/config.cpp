#include "mib/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mib/csv.hpp"
#include "mib/errors.hpp"

namespace mib {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size())
    throw ConfigError("config key " + key + ": '" + value + "' is not a number");
  return v;
}

uint64_t parse_uint(const std::string& key, const std::string& value) {
  uint64_t v = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size())
    throw ConfigError("config key " + key + ": '" + value +
                      "' is not a non-negative integer");
  return v;
}

}  // namespace

std::string RunConfig::roster_string() const {
  std::string out;
  for (ImputerKind k : roster) {
    if (!out.empty()) out += ",";
    out += imputer_name(k);
  }
  if (run_mib) out += out.empty() ? "mib" : ",mib";
  return out;
}

void parse_roster(const std::string& list, RunConfig& cfg) {
  cfg.roster.clear();
  cfg.run_mib = false;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name = trim(name);
    if (name.empty()) continue;
    if (name == "mib") {
      cfg.run_mib = true;
      continue;
    }
    auto kind = imputer_kind_from_name(name);
    if (!kind)
      throw ConfigError("unknown imputer '" + name + "'; valid names: " +
                        valid_imputer_names() + ", mib");
    for (ImputerKind k : cfg.roster)
      if (k == *kind) throw ConfigError("imputer '" + name + "' listed twice");
    cfg.roster.push_back(*kind);
  }
  if (cfg.roster.empty())
    throw ConfigError("imputer roster must name at least one base imputer");
}

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  ImputerSpec& ip = cfg.imputer_params;
  if (key == "data") cfg.data_path = value;
  else if (key == "target") cfg.target_name = value;
  else if (key == "rate") cfg.rate = parse_double(key, value);
  else if (key == "folds") cfg.folds = parse_uint(key, value);
  else if (key == "seed") cfg.seed = parse_uint(key, value);
  else if (key == "imputers") parse_roster(value, cfg);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "ridge_epsilon") cfg.ridge_epsilon = parse_double(key, value);
  else if (key == "fj_mode") {
    if (value == "one-hot") cfg.fj_mode = FjMode::OneHot;
    else if (value == "one-hot+stats") cfg.fj_mode = FjMode::OneHotStats;
    else throw ConfigError("fj_mode must be one-hot or one-hot+stats, got '" + value + "'");
  }
  else if (key == "self_mask_rate") cfg.self_mask_rate = parse_double(key, value);
  else if (key == "knn_k") ip.knn_k = parse_uint(key, value);
  else if (key == "mf_rank") ip.mf_rank = parse_uint(key, value);
  else if (key == "mf_reg") ip.mf_reg = parse_double(key, value);
  else if (key == "mf_lr") ip.mf_lr = parse_double(key, value);
  else if (key == "mf_epochs") ip.mf_epochs = parse_uint(key, value);
  else if (key == "gbt_trees") ip.gbt_trees = parse_uint(key, value);
  else if (key == "gbt_depth") ip.gbt_depth = parse_uint(key, value);
  else if (key == "gbt_lr") ip.gbt_lr = parse_double(key, value);
  else if (key == "ae_hidden") ip.ae_hidden = parse_uint(key, value);
  else if (key == "ae_epochs") ip.ae_epochs = parse_uint(key, value);
  else if (key == "ae_batch") ip.ae_batch = parse_uint(key, value);
  else if (key == "ae_lr") ip.ae_lr = parse_double(key, value);
  else if (key == "gain_hint_rate") ip.gain_hint_rate = parse_double(key, value);
  else if (key == "gain_alpha") ip.gain_alpha = parse_double(key, value);
  else if (key == "gain_epochs") ip.gain_epochs = parse_uint(key, value);
  else if (key == "gain_batch") ip.gain_batch = parse_uint(key, value);
  else if (key == "gain_lr") ip.gain_lr = parse_double(key, value);
  else if (key == "rf_trees") cfg.rf_trees = parse_uint(key, value);
  else if (key == "rf_depth") cfg.rf_depth = parse_uint(key, value);
  else if (key == "down_gbt_trees") cfg.down_gbt_trees = parse_uint(key, value);
  else if (key == "down_gbt_depth") cfg.down_gbt_depth = parse_uint(key, value);
  else if (key == "down_gbt_lr") cfg.down_gbt_lr = parse_double(key, value);
  else if (key == "threads") cfg.threads = static_cast<int>(parse_uint(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void validate_config(const RunConfig& cfg, bool for_benchmark) {
  if (cfg.rate < 0.0 || cfg.rate > 1.0)
    throw ConfigError("rate must be in [0, 1]");
  if (for_benchmark && cfg.rate >= 1.0)
    throw ConfigError("benchmark rate must be < 1 (some cells must stay observed)");
  if (cfg.folds < 2) throw ConfigError("folds must be >= 2");
  if (cfg.roster.empty())
    throw ConfigError("imputer roster must name at least one base imputer");
  if (cfg.ridge_epsilon < 0.0) throw ConfigError("ridge_epsilon must be >= 0");
  if (cfg.self_mask_rate <= 0.0 || cfg.self_mask_rate >= 1.0)
    throw ConfigError("self_mask_rate must be in (0, 1)");
  if (cfg.rf_trees < 1 || cfg.down_gbt_trees < 1)
    throw ConfigError("downstream model tree counts must be >= 1");
  if (!(cfg.down_gbt_lr > 0.0))
    throw ConfigError("down_gbt_lr must be > 0");
}

std::string RunConfig::canonical_string() const {
  const ImputerSpec& ip = imputer_params;
  std::ostringstream out;
  // Alphabetical by key; excluded: out (placement only), threads (must not
  // change any number).
  out << "ae_batch=" << ip.ae_batch << ";ae_epochs=" << ip.ae_epochs
      << ";ae_hidden=" << ip.ae_hidden << ";ae_lr=" << format_value(ip.ae_lr)
      << ";data=" << data_path
      << ";down_gbt_depth=" << down_gbt_depth
      << ";down_gbt_lr=" << format_value(down_gbt_lr)
      << ";down_gbt_trees=" << down_gbt_trees
      << ";fj_mode=" << fj_mode_name(fj_mode)
      << ";folds=" << folds
      << ";gain_alpha=" << format_value(ip.gain_alpha)
      << ";gain_batch=" << ip.gain_batch << ";gain_epochs=" << ip.gain_epochs
      << ";gain_hint_rate=" << format_value(ip.gain_hint_rate)
      << ";gain_lr=" << format_value(ip.gain_lr)
      << ";gbt_depth=" << ip.gbt_depth << ";gbt_lr=" << format_value(ip.gbt_lr)
      << ";gbt_trees=" << ip.gbt_trees
      << ";imputers=" << roster_string()
      << ";knn_k=" << ip.knn_k
      << ";mf_epochs=" << ip.mf_epochs << ";mf_lr=" << format_value(ip.mf_lr)
      << ";mf_rank=" << ip.mf_rank << ";mf_reg=" << format_value(ip.mf_reg)
      << ";rate=" << format_value(rate)
      << ";rf_depth=" << rf_depth << ";rf_trees=" << rf_trees
      << ";ridge_epsilon=" << format_value(ridge_epsilon)
      << ";seed=" << seed
      << ";self_mask_rate=" << format_value(self_mask_rate)
      << ";target=" << (target_name ? *target_name : "");
  return out.str();
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t RunConfig::config_hash() const { return fnv1a64(canonical_string()); }

}  // namespace mib
