#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mib/config.hpp"
#include "mib/csv.hpp"
#include "mib/errors.hpp"
#include "mib/evaluation.hpp"
#include "mib/mask.hpp"
#include "mib/meta.hpp"
#include "mib/parallel.hpp"
#include "mib/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

std::string hash_hex(const mib::RunConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(cfg.config_hash()));
  return buf;
}

std::string out_path(const mib::RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void cmd_mask(const mib::RunConfig& cfg) {
  mib::validate_config(cfg, false);
  mib::DataMatrix data = mib::load_csv(cfg.data_path, cfg.target_name);
  const size_t excluded = data.target_col ? *data.target_col : SIZE_MAX;
  mib::Mask mask = mib::apply_mcar_mask(data, cfg.rate, cfg.seed, excluded);

  const std::vector<std::string> comments = {
      "config_hash=" + hash_hex(cfg) + " seed=" + std::to_string(cfg.seed) +
      " rate=" + mib::format_value(cfg.rate)};
  const std::string masked_path = out_path(cfg, "masked.csv");
  mib::write_csv(data, masked_path, comments);
  const std::string sidecar_path = out_path(cfg, "mask.csv");
  mib::write_text_file(sidecar_path,
                       "# config_hash=" + hash_hex(cfg) + "\n" + render_mask(mask));
  std::cout << "hid " << mask.count() << " of " << data.rows * data.cols
            << " cells\nwrote " << masked_path << "\nwrote " << sidecar_path << "\n";
}

void cmd_impute(const mib::RunConfig& cfg, const std::string& method,
                const std::string& mask_path) {
  mib::validate_config(cfg, false);
  mib::DataMatrix data = mib::load_csv(cfg.data_path, cfg.target_name);
  const mib::StandardizationParams sp = mib::fit_standardizer(data);
  const mib::DataMatrix data_s = mib::apply_standardizer(data, sp);

  std::vector<std::string> comments = {
      "config_hash=" + hash_hex(cfg) + " seed=" + std::to_string(cfg.seed) +
      " method=" + method};
  mib::DataMatrix completed_s = mib::make_matrix(1, 2);

  if (method == "mib") {
    mib::Mask meta_mask;
    mib::DataMatrix fit_matrix = data_s;
    if (!mask_path.empty()) {
      // The data file is the masked dataset; the sidecar holds the hidden
      // ground truth, which becomes the meta-model's supervision.
      meta_mask = mib::load_mask(mask_path, data.rows, data.cols);
      for (size_t i = 0; i < data.rows; ++i) {
        for (size_t j = 0; j < data.cols; ++j) {
          if (!meta_mask.is_hidden(i, j)) continue;
          if (data.is_observed(i, j))
            throw mib::DataError("mask sidecar hides cell (" + std::to_string(i) +
                                 "," + std::to_string(j) +
                                 ") but the data file has a value there");
          const double t = meta_mask.truth[i * data.cols + j];
          meta_mask.truth[i * data.cols + j] =
              sp.stds[j] == 0.0 ? 0.0 : (t - sp.means[j]) / sp.stds[j];
        }
      }
    } else {
      size_t observed = 0;
      for (uint8_t o : data_s.observed) observed += o;
      if (observed == 0) throw mib::DataError("no observed cells to self-mask");
      meta_mask = mib::apply_mcar_mask(fit_matrix, cfg.self_mask_rate,
                                       mib::derive_seed(cfg.seed, 0x5E1F),
                                       SIZE_MAX);
      if (meta_mask.count() == 0)
        throw std::runtime_error(
            "self-masking hid no cells; raise self_mask_rate or check the data");
      comments.push_back("self_mask_rate=" + mib::format_value(cfg.self_mask_rate) +
                         " self_masked_cells=" + std::to_string(meta_mask.count()));
    }

    std::vector<std::unique_ptr<mib::FittedImputer>> fitted;
    std::vector<mib::DataMatrix> completions;
    for (mib::ImputerKind kind : cfg.roster) {
      mib::ImputerSpec spec = cfg.imputer_params;
      spec.kind = kind;
      spec.seed = mib::derive_seed(cfg.seed, 0x3000 + mib::imputer_kind_index(kind));
      fitted.push_back(mib::fit_imputer(spec, fit_matrix));
      completions.push_back(fitted.back()->transform(fit_matrix));
    }
    mib::FjInfo fj;
    fj.mode = cfg.fj_mode;
    if (fj.mode == mib::FjMode::OneHotStats) {
      fj.col_means = sp.means;
      fj.col_stds = sp.stds;
    }
    const mib::MetaTrainingSet ts =
        mib::assemble_training_set(completions, meta_mask, fj);
    mib::MetaModel model = mib::fit_meta(ts, cfg.ridge_epsilon, cfg.roster);
    model.fj = fj;
    completed_s = mib::mib_complete(model, fitted, data_s);
    mib::write_text_file(out_path(cfg, "meta_model.txt"), mib::serialize_meta(model));
  } else {
    auto kind = mib::imputer_kind_from_name(method);
    if (!kind)
      throw mib::ConfigError("unknown method '" + method + "'; valid names: " +
                             mib::valid_imputer_names() + ", mib");
    mib::ImputerSpec spec = cfg.imputer_params;
    spec.kind = *kind;
    spec.seed = mib::derive_seed(cfg.seed, 0x3000 + mib::imputer_kind_index(*kind));
    completed_s = mib::fit_imputer(spec, data_s)->transform(data_s);
  }

  const mib::DataMatrix completed = mib::invert_standardizer(completed_s, sp);
  const std::string path = out_path(cfg, "imputed.csv");
  mib::write_csv(completed, path, comments);
  std::cout << "wrote " << path << "\n";
}

void cmd_benchmark(const mib::RunConfig& cfg) {
  if (!cfg.target_name)
    throw mib::ConfigError("benchmark requires --target naming the response column");
  mib::DataMatrix data = mib::load_csv(cfg.data_path, cfg.target_name);
  mib::BenchmarkReport report = mib::run_benchmark(data, cfg);
  const std::string report_path = out_path(cfg, "report.csv");
  mib::write_text_file(report_path, report.to_csv());
  const std::string summary_path = out_path(cfg, "summary.txt");
  mib::write_text_file(summary_path, report.summary_table());
  std::cout << report.summary_table() << "\nwrote " << report_path << "\nwrote "
            << summary_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  mib::RunConfig cfg;
  cfg.roster.clear();
  std::string config_path;
  std::string method;
  std::string mask_path;
  std::string imputers_list;
  std::string fj_mode_str;

  CLI::App app{"Missing-data imputation toolkit with a stacked meta-imputer"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--data", cfg.data_path, "input CSV path");
  auto* target_opt =
      app.add_option("--target", "response column name (required for benchmark)");
  app.add_option("--rate", cfg.rate, "artificial missingness rate");
  app.add_option("--folds", cfg.folds, "cross-validation fold count");
  app.add_option("--seed", cfg.seed, "base random seed");
  app.add_option("--imputers", imputers_list,
                 "comma list of imputers (mean,median,mode,knn,mf,gbt,autoencoder,"
                 "gain,mib)");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--config", config_path,
                 "key=value config file; its settings override flags");
  app.add_option("--fj-mode", fj_mode_str,
                 "column-metadata block: one-hot or one-hot+stats");
  app.add_option("--threads", cfg.threads, "worker thread cap (0 = default)");

  CLI::App* mask_cmd = app.add_subcommand("mask", "hide cells at random, keeping truth");
  CLI::App* impute_cmd = app.add_subcommand("impute", "complete a dataset");
  impute_cmd->add_option("--method", method, "imputer name or mib")->required();
  impute_cmd->add_option("--mask", mask_path,
                         "mask sidecar supplying ground truth for mib");
  CLI::App* bench_cmd =
      app.add_subcommand("benchmark", "cross-validated imputation benchmark");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (target_opt->count()) cfg.target_name = target_opt->as<std::string>();
    if (!imputers_list.empty()) mib::parse_roster(imputers_list, cfg);
    if (!fj_mode_str.empty()) mib::apply_config_kv(cfg, "fj_mode", fj_mode_str);
    if (!config_path.empty()) mib::apply_config_file(cfg, config_path);
    if (cfg.roster.empty()) {
      for (mib::ImputerKind k : mib::all_imputer_kinds()) cfg.roster.push_back(k);
      cfg.run_mib = true;
    }
    if (cfg.data_path.empty()) throw mib::ConfigError("--data is required");
    if (cfg.threads > 0) mib::set_max_threads(cfg.threads);

    if (mask_cmd->parsed()) cmd_mask(cfg);
    else if (impute_cmd->parsed()) cmd_impute(cfg, method, mask_path);
    else if (bench_cmd->parsed()) cmd_benchmark(cfg);
    return kExitOk;
  } catch (const mib::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mib::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
