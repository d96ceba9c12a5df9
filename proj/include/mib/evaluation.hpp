#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mib/config.hpp"
#include "mib/data_matrix.hpp"
#include "mib/mask.hpp"

namespace mib {

struct DirectScores {
  double masked_mae = 0.0;
  double masked_rmse = 0.0;
  size_t n_cells = 0;
};

struct IndirectScores {
  double pred_rmse_rf = 0.0;
  double pred_rmse_gbt = 0.0;
  double pred_rmse_lr = 0.0;
};

struct BenchmarkRow {
  std::string imputer;
  size_t fold = 0;
  DirectScores direct;
  IndirectScores indirect;
};

/// Training-fold check of the stacking guarantee: the meta-model cannot do
/// worse than its best base imputer on the cells it was fitted on.
struct DominanceRecord {
  size_t fold = 0;
  double mib_train_rmse = 0.0;
  double best_base_train_rmse = 0.0;
  bool ok = false;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> fold_rows;       // one per imputer per fold
  std::vector<BenchmarkRow> aggregate_rows;  // fold means, one per imputer
  std::vector<DominanceRecord> dominance;    // one per fold when mib runs
  std::string data_path;
  uint64_t seed = 0;
  double rate = 0.0;
  size_t folds = 0;
  std::string roster;
  std::string config_hash_hex;

  std::string to_csv() const;
  std::string summary_table() const;
};

/// MAE and RMSE between imputed values and the hidden ground truth.
DirectScores direct_scores(const DataMatrix& imputed, const Mask& mask);

/// Fits the three downstream models on the completed training matrix and
/// scores their target predictions on the completed test matrix. Rows whose
/// target was missing in the source data carry no ground truth and are
/// dropped from fitting and from scoring.
IndirectScores indirect_scores(const DataMatrix& train_imputed,
                               const DataMatrix& test_imputed, size_t target_col,
                               const std::vector<uint8_t>& train_target_observed,
                               const std::vector<uint8_t>& test_target_observed,
                               const RunConfig& cfg, uint64_t rf_seed,
                               uint64_t gbt_seed);

/// Full cross-validated protocol: split, standardize on the training fold,
/// mask both folds, fit base imputers on the masked training fold, train the
/// meta-model on the training mask, and score everything on the test mask.
BenchmarkReport run_benchmark(const DataMatrix& data, const RunConfig& cfg);

std::string fmt_fixed(double v, int decimals);

}  // namespace mib
