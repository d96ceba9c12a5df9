#include "mib/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "mib/errors.hpp"
#include "mib/linalg.hpp"
#include "mib/meta.hpp"
#include "mib/rng.hpp"
#include "mib/trees.hpp"

namespace mib {
namespace {

// Seed-derivation tags. Masks depend on (fold, role) and imputer fits on
// (fold, kind), so changing the roster never changes which cells are hidden.
constexpr uint64_t kMaskTagBase = 0x4000;
constexpr uint64_t kFitTagBase = 0x1000;
constexpr uint64_t kDownstreamTagBase = 0x2000;

constexpr double kLinearDownstreamEpsilon = 1e-8;

double rmse_from(const std::vector<double>& pred, const std::vector<double>& truth) {
  double s = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

}  // namespace

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

DirectScores direct_scores(const DataMatrix& imputed, const Mask& mask) {
  if (mask.count() == 0)
    throw std::runtime_error("direct_scores: mask has no hidden cells");
  DirectScores s;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (size_t i = 0; i < mask.rows; ++i) {
    for (size_t j = 0; j < mask.cols; ++j) {
      if (!mask.is_hidden(i, j)) continue;
      const double e = imputed.at(i, j) - mask.truth[i * mask.cols + j];
      abs_sum += std::fabs(e);
      sq_sum += e * e;
      ++s.n_cells;
    }
  }
  s.masked_mae = abs_sum / static_cast<double>(s.n_cells);
  s.masked_rmse = std::sqrt(sq_sum / static_cast<double>(s.n_cells));
  return s;
}

IndirectScores indirect_scores(const DataMatrix& train_imputed,
                               const DataMatrix& test_imputed, size_t target_col,
                               const std::vector<uint8_t>& train_target_observed,
                               const std::vector<uint8_t>& test_target_observed,
                               const RunConfig& cfg, uint64_t rf_seed,
                               uint64_t gbt_seed) {
  const size_t d = train_imputed.cols;
  if (test_imputed.cols != d || target_col >= d)
    throw std::runtime_error("indirect_scores: shape mismatch");
  const size_t p = d - 1;

  auto extract = [&](const DataMatrix& m, const std::vector<uint8_t>& keep,
                     std::vector<double>& x, std::vector<double>& y) {
    for (size_t i = 0; i < m.rows; ++i) {
      if (!keep[i]) continue;
      for (size_t j = 0; j < d; ++j) {
        if (j == target_col) continue;
        x.push_back(m.at(i, j));
      }
      y.push_back(m.at(i, target_col));
    }
  };
  std::vector<double> x_train, y_train, x_test, y_test;
  extract(train_imputed, train_target_observed, x_train, y_train);
  extract(test_imputed, test_target_observed, x_test, y_test);
  if (y_train.empty())
    throw std::runtime_error("indirect_scores: no training rows with an observed target");
  if (y_test.empty())
    throw std::runtime_error("indirect_scores: no test rows with an observed target");
  const size_t n_train = y_train.size();
  const size_t n_test = y_test.size();

  IndirectScores out;
  {
    ForestParams fp;
    fp.n_trees = cfg.rf_trees;
    fp.max_depth = cfg.rf_depth;
    fp.seed = rf_seed;
    ForestModel rf = forest_fit(x_train, n_train, p, y_train, fp);
    out.pred_rmse_rf = rmse_from(predict(rf, x_test, n_test), y_test);
  }
  {
    BoostParams bp;
    bp.n_trees = cfg.down_gbt_trees;
    bp.max_depth = cfg.down_gbt_depth;
    bp.learning_rate = cfg.down_gbt_lr;
    bp.seed = gbt_seed;
    BoostedModel gbt = boost_fit(x_train, n_train, p, y_train, bp);
    out.pred_rmse_gbt = rmse_from(predict(gbt, x_test, n_test), y_test);
  }
  {
    LinearModel lr = fit_linear(x_train, n_train, p, y_train, kLinearDownstreamEpsilon);
    std::vector<double> pred(n_test);
    for (size_t i = 0; i < n_test; ++i) pred[i] = predict_linear(lr, &x_test[i * p]);
    out.pred_rmse_lr = rmse_from(pred, y_test);
  }
  return out;
}

BenchmarkReport run_benchmark(const DataMatrix& data, const RunConfig& cfg) {
  validate_config(cfg, true);
  if (!data.target_col)
    throw ConfigError("benchmark requires a target column (set target=<name>)");
  const size_t target = *data.target_col;
  const size_t k = cfg.folds;

  BenchmarkReport report;
  report.data_path = cfg.data_path;
  report.seed = cfg.seed;
  report.rate = cfg.rate;
  report.folds = k;
  report.roster = cfg.roster_string();
  {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << cfg.config_hash();
    report.config_hash_hex = hex.str();
  }

  std::vector<std::string> row_names;
  for (ImputerKind kind : cfg.roster) row_names.push_back(imputer_name(kind));
  if (cfg.run_mib) row_names.push_back("mib");

  const FoldPlan plan = make_fold_plan(data.rows, k, cfg.seed);
  for (size_t fold = 0; fold < k; ++fold) {
    const std::vector<size_t> test_rows = plan.fold_rows(fold);
    const std::vector<size_t> train_rows = plan.complement_rows(fold);
    DataMatrix train = select_rows(data, train_rows);
    DataMatrix test = select_rows(data, test_rows);

    const StandardizationParams std_params = fit_standardizer(train);
    DataMatrix train_s = apply_standardizer(train, std_params);
    DataMatrix test_s = apply_standardizer(test, std_params);

    const Mask train_mask = apply_mcar_mask(
        train_s, cfg.rate, derive_seed(cfg.seed, kMaskTagBase + fold * 4), target);
    const Mask test_mask = apply_mcar_mask(
        test_s, cfg.rate, derive_seed(cfg.seed, kMaskTagBase + fold * 4 + 1), target);
    if (test_mask.count() == 0)
      throw std::runtime_error("fold " + std::to_string(fold) +
                               ": no cells were masked in the test fold; "
                               "increase rate or dataset size");
    if (cfg.run_mib && train_mask.count() == 0)
      throw std::runtime_error("fold " + std::to_string(fold) +
                               ": no masked training cells to fit the meta-model on");

    std::vector<uint8_t> train_target_obs(train.rows), test_target_obs(test.rows);
    for (size_t i = 0; i < train.rows; ++i)
      train_target_obs[i] = train.is_observed(i, target);
    for (size_t i = 0; i < test.rows; ++i)
      test_target_obs[i] = test.is_observed(i, target);

    const uint64_t rf_seed = derive_seed(cfg.seed, kDownstreamTagBase + fold * 8);
    const uint64_t gbt_seed = derive_seed(cfg.seed, kDownstreamTagBase + fold * 8 + 1);

    std::vector<std::unique_ptr<FittedImputer>> fitted;
    std::vector<DataMatrix> train_completed, test_completed;
    for (ImputerKind kind : cfg.roster) {
      ImputerSpec spec = cfg.imputer_params;
      spec.kind = kind;
      spec.seed = derive_seed(cfg.seed,
                              kFitTagBase + fold * 16 + imputer_kind_index(kind));
      try {
        fitted.push_back(fit_imputer(spec, train_s));
        train_completed.push_back(fitted.back()->transform(train_s));
        test_completed.push_back(fitted.back()->transform(test_s));
      } catch (const std::exception& e) {
        throw std::runtime_error("imputer " + std::string(imputer_name(kind)) +
                                 ", fold " + std::to_string(fold) + ": " + e.what());
      }
    }

    std::vector<double> base_train_rmse(cfg.roster.size());
    for (size_t ki = 0; ki < cfg.roster.size(); ++ki) {
      if (train_mask.count() > 0)
        base_train_rmse[ki] = direct_scores(train_completed[ki], train_mask).masked_rmse;
      BenchmarkRow row;
      row.imputer = imputer_name(cfg.roster[ki]);
      row.fold = fold;
      row.direct = direct_scores(test_completed[ki], test_mask);
      row.indirect =
          indirect_scores(train_completed[ki], test_completed[ki], target,
                          train_target_obs, test_target_obs, cfg, rf_seed, gbt_seed);
      report.fold_rows.push_back(std::move(row));
    }

    if (cfg.run_mib) {
      try {
        FjInfo fj;
        fj.mode = cfg.fj_mode;
        if (fj.mode == FjMode::OneHotStats) {
          fj.col_means = std_params.means;
          fj.col_stds = std_params.stds;
        }
        const MetaTrainingSet ts =
            assemble_training_set(train_completed, train_mask, fj);
        MetaModel model = fit_meta(ts, cfg.ridge_epsilon, cfg.roster);
        model.fj = fj;

        const std::vector<double> mib_train_pred =
            predict_meta(model, train_completed, ts.positions);
        std::vector<double> train_truth(ts.positions.size());
        for (size_t z = 0; z < ts.positions.size(); ++z)
          train_truth[z] = ts.positions[z].truth;
        DominanceRecord dom;
        dom.fold = fold;
        dom.mib_train_rmse = rmse_from(mib_train_pred, train_truth);
        dom.best_base_train_rmse = base_train_rmse[0];
        for (double r : base_train_rmse)
          if (r < dom.best_base_train_rmse) dom.best_base_train_rmse = r;
        dom.ok = dom.mib_train_rmse <= dom.best_base_train_rmse + 1e-3;
        report.dominance.push_back(dom);

        DataMatrix mib_train = mib_complete(model, fitted, train_s);
        DataMatrix mib_test = mib_complete(model, fitted, test_s);
        BenchmarkRow row;
        row.imputer = "mib";
        row.fold = fold;
        row.direct = direct_scores(mib_test, test_mask);
        row.indirect = indirect_scores(mib_train, mib_test, target, train_target_obs,
                                       test_target_obs, cfg, rf_seed, gbt_seed);
        report.fold_rows.push_back(std::move(row));
      } catch (const std::exception& e) {
        throw std::runtime_error("imputer mib, fold " + std::to_string(fold) + ": " +
                                 e.what());
      }
    }
  }

  for (const std::string& name : row_names) {
    BenchmarkRow agg;
    agg.imputer = name;
    agg.fold = SIZE_MAX;
    size_t cnt = 0;
    for (const BenchmarkRow& row : report.fold_rows) {
      if (row.imputer != name) continue;
      agg.direct.masked_mae += row.direct.masked_mae;
      agg.direct.masked_rmse += row.direct.masked_rmse;
      agg.direct.n_cells += row.direct.n_cells;
      agg.indirect.pred_rmse_rf += row.indirect.pred_rmse_rf;
      agg.indirect.pred_rmse_gbt += row.indirect.pred_rmse_gbt;
      agg.indirect.pred_rmse_lr += row.indirect.pred_rmse_lr;
      ++cnt;
    }
    agg.direct.masked_mae /= static_cast<double>(cnt);
    agg.direct.masked_rmse /= static_cast<double>(cnt);
    agg.indirect.pred_rmse_rf /= static_cast<double>(cnt);
    agg.indirect.pred_rmse_gbt /= static_cast<double>(cnt);
    agg.indirect.pred_rmse_lr /= static_cast<double>(cnt);
    report.aggregate_rows.push_back(std::move(agg));
  }
  return report;
}

std::string BenchmarkReport::to_csv() const {
  std::ostringstream out;
  out << "# config_hash=" << config_hash_hex << " seed=" << seed
      << " rate=" << fmt_fixed(rate, 6) << " folds=" << folds << " data=" << data_path
      << " imputers=" << roster << "\n";
  out << "imputer,fold,masked_mae,masked_rmse,pred_rmse_rf,pred_rmse_gbt,pred_rmse_lr\n";
  auto emit = [&](const BenchmarkRow& row, const std::string& fold_label) {
    out << row.imputer << ',' << fold_label << ',' << fmt_fixed(row.direct.masked_mae, 6)
        << ',' << fmt_fixed(row.direct.masked_rmse, 6) << ','
        << fmt_fixed(row.indirect.pred_rmse_rf, 6) << ','
        << fmt_fixed(row.indirect.pred_rmse_gbt, 6) << ','
        << fmt_fixed(row.indirect.pred_rmse_lr, 6) << "\n";
  };
  for (const BenchmarkRow& row : fold_rows) emit(row, std::to_string(row.fold));
  for (const BenchmarkRow& row : aggregate_rows) emit(row, "aggregate");
  for (const DominanceRecord& dom : dominance) {
    out << "# dominance fold=" << dom.fold
        << " mib_train_rmse=" << fmt_fixed(dom.mib_train_rmse, 6)
        << " best_base_train_rmse=" << fmt_fixed(dom.best_base_train_rmse, 6)
        << " ok=" << (dom.ok ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string BenchmarkReport::summary_table() const {
  std::ostringstream out;
  out << "Imputation benchmark: " << data_path << "\n";
  out << "seed " << seed << ", rate " << fmt_fixed(rate, 2) << ", " << folds
      << " folds, imputers " << roster << "\n";
  out << "config_hash " << config_hash_hex << "\n\n";
  out << std::left << std::setw(14) << "imputer" << std::right << std::setw(12)
      << "Masked MAE" << std::setw(13) << "Masked RMSE" << std::setw(16)
      << "Pred RMSE (RF)" << std::setw(23) << "Pred RMSE (XGB-style)" << std::setw(16)
      << "Pred RMSE (LR)" << "\n";
  for (const BenchmarkRow& row : aggregate_rows) {
    out << std::left << std::setw(14) << row.imputer << std::right << std::setw(12)
        << fmt_fixed(row.direct.masked_mae, 4) << std::setw(13)
        << fmt_fixed(row.direct.masked_rmse, 4) << std::setw(16)
        << fmt_fixed(row.indirect.pred_rmse_rf, 4) << std::setw(23)
        << fmt_fixed(row.indirect.pred_rmse_gbt, 4) << std::setw(16)
        << fmt_fixed(row.indirect.pred_rmse_lr, 4) << "\n";
  }
  if (!dominance.empty()) {
    bool all_ok = true;
    for (const DominanceRecord& dom : dominance) all_ok = all_ok && dom.ok;
    out << "\ntraining-fold dominance check: " << (all_ok ? "ok" : "VIOLATED")
        << " (" << dominance.size() << " folds)\n";
  }
  return out.str();
}

}  // namespace mib
