#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "mib/config.hpp"
#include "mib/errors.hpp"

using namespace mib;

namespace {

std::string temp_config(const std::string& body, const std::string& tag) {
  const std::string path = "/tmp/mib_test_config_" + tag + ".cfg";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("config defaults are sensible") {
  RunConfig cfg;
  CHECK(cfg.rate == 0.1);
  CHECK(cfg.folds == 5);
  CHECK(cfg.seed == 42);
  CHECK(cfg.run_mib);
  CHECK(cfg.ridge_epsilon == 1e-6);
  CHECK(cfg.fj_mode == FjMode::OneHot);
  CHECK(cfg.self_mask_rate == 0.1);
  CHECK(cfg.imputer_params.knn_k == 5);
  CHECK(cfg.imputer_params.mf_rank == 0);
  CHECK(cfg.imputer_params.gbt_trees == 100);
  CHECK(cfg.imputer_params.gain_hint_rate == 0.9);
  CHECK(cfg.rf_trees == 100);
  CHECK(cfg.down_gbt_trees == 100);
  CHECK(cfg.threads == 0);
}

TEST_CASE("key=value settings land in the right fields") {
  RunConfig cfg;
  apply_config_kv(cfg, "rate", "0.25");
  apply_config_kv(cfg, "folds", "7");
  apply_config_kv(cfg, "seed", "123");
  apply_config_kv(cfg, "target", "income");
  apply_config_kv(cfg, "knn_k", "9");
  apply_config_kv(cfg, "mf_rank", "4");
  apply_config_kv(cfg, "mf_reg", "0.5");
  apply_config_kv(cfg, "gbt_lr", "0.2");
  apply_config_kv(cfg, "ae_hidden", "6");
  apply_config_kv(cfg, "gain_alpha", "3.5");
  apply_config_kv(cfg, "rf_trees", "33");
  apply_config_kv(cfg, "down_gbt_depth", "5");
  apply_config_kv(cfg, "fj_mode", "one-hot+stats");
  apply_config_kv(cfg, "threads", "2");
  apply_config_kv(cfg, "imputers", "mean,knn,mib");
  CHECK(cfg.rate == 0.25);
  CHECK(cfg.folds == 7);
  CHECK(cfg.seed == 123);
  CHECK(cfg.target_name == "income");
  CHECK(cfg.imputer_params.knn_k == 9);
  CHECK(cfg.imputer_params.mf_rank == 4);
  CHECK(cfg.imputer_params.mf_reg == 0.5);
  CHECK(cfg.imputer_params.gbt_lr == 0.2);
  CHECK(cfg.imputer_params.ae_hidden == 6);
  CHECK(cfg.imputer_params.gain_alpha == 3.5);
  CHECK(cfg.rf_trees == 33);
  CHECK(cfg.down_gbt_depth == 5);
  CHECK(cfg.fj_mode == FjMode::OneHotStats);
  CHECK(cfg.threads == 2);
  CHECK(cfg.roster == std::vector<ImputerKind>({ImputerKind::Mean, ImputerKind::Knn}));
  CHECK(cfg.run_mib);
}

TEST_CASE("bad keys and values are rejected") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_config_kv(cfg, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "rate", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "folds", "-3"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "folds", "2.5"), ConfigError);
  CHECK_THROWS_AS(apply_config_kv(cfg, "fj_mode", "two-hot"), ConfigError);
}

TEST_CASE("roster strings parse with the mib toggle") {
  RunConfig cfg;
  parse_roster("median , gain,mib", cfg);
  CHECK(cfg.roster ==
        std::vector<ImputerKind>({ImputerKind::Median, ImputerKind::Gain}));
  CHECK(cfg.run_mib);

  parse_roster("mean", cfg);
  CHECK(cfg.roster == std::vector<ImputerKind>({ImputerKind::Mean}));
  CHECK(!cfg.run_mib);

  CHECK_THROWS_AS(parse_roster("mean,unknown", cfg), ConfigError);
  CHECK_THROWS_AS(parse_roster("mean,mean", cfg), ConfigError);
  CHECK_THROWS_AS(parse_roster("mib", cfg), ConfigError);  // no base imputer
  CHECK_THROWS_AS(parse_roster("", cfg), ConfigError);
}

TEST_CASE("roster_string reflects the parsed roster") {
  RunConfig cfg;
  parse_roster("knn,mf,mib", cfg);
  CHECK(cfg.roster_string() == "knn,mf,mib");
  parse_roster("autoencoder", cfg);
  CHECK(cfg.roster_string() == "autoencoder");
}

TEST_CASE("validation enforces the documented bounds") {
  RunConfig ok;
  parse_roster("mean", ok);
  validate_config(ok, false);
  validate_config(ok, true);

  RunConfig bad = ok;
  bad.rate = -0.1;
  CHECK_THROWS_AS(validate_config(bad, false), ConfigError);
  bad = ok;
  bad.rate = 1.0;
  validate_config(bad, false);  // fine for plain masking
  CHECK_THROWS_AS(validate_config(bad, true), ConfigError);  // not for benchmarks
  bad = ok;
  bad.folds = 1;
  CHECK_THROWS_AS(validate_config(bad, false), ConfigError);
  bad = ok;
  bad.roster.clear();
  CHECK_THROWS_AS(validate_config(bad, false), ConfigError);
  bad = ok;
  bad.self_mask_rate = 0.0;
  CHECK_THROWS_AS(validate_config(bad, false), ConfigError);
  bad = ok;
  bad.self_mask_rate = 1.0;
  CHECK_THROWS_AS(validate_config(bad, false), ConfigError);
  bad = ok;
  bad.rf_trees = 0;
  CHECK_THROWS_AS(validate_config(bad, false), ConfigError);
  bad = ok;
  bad.down_gbt_lr = 0.0;
  CHECK_THROWS_AS(validate_config(bad, false), ConfigError);
}

TEST_CASE("config hash is stable and keyed on meaningful fields only") {
  RunConfig a;
  a.data_path = "d.csv";
  parse_roster("mean,knn,mib", a);
  RunConfig b = a;
  CHECK(a.canonical_string() == b.canonical_string());
  CHECK(a.config_hash() == b.config_hash());

  b.threads = 8;  // execution detail, not an experiment parameter
  CHECK(a.config_hash() == b.config_hash());
  b.out_dir = "elsewhere";
  CHECK(a.config_hash() == b.config_hash());

  b.seed = 43;
  CHECK(a.config_hash() != b.config_hash());
  b = a;
  b.rate = 0.2;
  CHECK(a.config_hash() != b.config_hash());
  b = a;
  parse_roster("mean,knn", b);
  CHECK(a.config_hash() != b.config_hash());
  b = a;
  b.imputer_params.knn_k = 6;
  CHECK(a.config_hash() != b.config_hash());
}

TEST_CASE("fnv1a64 matches known test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("config files apply line by line with comments ignored") {
  const std::string path = temp_config(
      "# experiment settings\n"
      "rate = 0.3\n"
      "\n"
      "folds=4\n"
      "imputers = mean,median,mib\n"
      "knn_k=11\n",
      "basic");
  RunConfig cfg;
  apply_config_file(cfg, path);
  CHECK(cfg.rate == 0.3);
  CHECK(cfg.folds == 4);
  CHECK(cfg.roster.size() == 2);
  CHECK(cfg.run_mib);
  CHECK(cfg.imputer_params.knn_k == 11);
  std::remove(path.c_str());
}

TEST_CASE("config files override earlier settings") {
  const std::string path = temp_config("seed=7\n", "override");
  RunConfig cfg;
  cfg.seed = 42;
  apply_config_file(cfg, path);
  CHECK(cfg.seed == 7);
  std::remove(path.c_str());
}

TEST_CASE("config file errors are descriptive") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent.cfg"), ConfigError);
  const std::string path = temp_config("this line has no equals\n", "noeq");
  CHECK_THROWS_AS(apply_config_file(cfg, path), ConfigError);
  std::remove(path.c_str());
}
