#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mib/imputer.hpp"
#include "mib/meta.hpp"

namespace mib {

/// Everything that determines a run's numbers. The hash over the canonical
/// form is embedded in every output file so results can be traced back to
/// the exact configuration that produced them.
struct RunConfig {
  std::string data_path;
  std::optional<std::string> target_name;
  double rate = 0.1;
  size_t folds = 5;
  uint64_t seed = 42;
  std::vector<ImputerKind> roster;  // defaults to all kinds when empty at parse end
  bool run_mib = true;
  std::string out_dir = ".";
  double ridge_epsilon = 1e-6;
  FjMode fj_mode = FjMode::OneHot;
  double self_mask_rate = 0.1;  // used when imputing with mib and no mask file

  // Template for per-imputer hyperparameters; kind and seed are assigned
  // where each imputer is fitted.
  ImputerSpec imputer_params;

  // Downstream evaluation models.
  size_t rf_trees = 100;
  size_t rf_depth = 8;
  size_t down_gbt_trees = 100;
  size_t down_gbt_depth = 3;
  double down_gbt_lr = 0.3;

  int threads = 0;  // 0 keeps the library default; excluded from the hash

  std::string roster_string() const;  // e.g. "mean,median,mib"
  std::string canonical_string() const;
  uint64_t config_hash() const;
};

/// Parses a comma list of imputer names, with "mib" toggling the meta run.
void parse_roster(const std::string& list, RunConfig& cfg);

/// Applies one key=value assignment. Unknown keys and malformed values
/// throw ConfigError.
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

/// key=value per line; '#' starts a comment; blank lines ignored.
void apply_config_file(RunConfig& cfg, const std::string& path);

/// Range and consistency checks shared by all commands.
void validate_config(const RunConfig& cfg, bool for_benchmark);

uint64_t fnv1a64(const std::string& s);

}  // namespace mib
