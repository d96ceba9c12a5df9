#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mib/data_matrix.hpp"
#include "mib/imputer.hpp"
#include "mib/mask.hpp"

namespace mib {

enum class FjMode { OneHot, OneHotStats };

const char* fj_mode_name(FjMode mode);

/// Column-metadata block appended to each per-cell design vector: a one-hot
/// of the cell's column, optionally followed by that column's original-scale
/// mean and standard deviation.
struct FjInfo {
  FjMode mode = FjMode::OneHot;
  std::vector<double> col_means;  // used in OneHotStats mode
  std::vector<double> col_stds;

  size_t block_width(size_t d) const {
    return d + (mode == FjMode::OneHotStats ? 2 : 0);
  }
};

struct MetaTrainingSet {
  std::vector<double> x;  // n_rows x width, row-major
  std::vector<double> y;
  std::vector<MaskedCell> positions;
  size_t n_imputers = 0;
  size_t n_cols = 0;
  size_t width = 0;  // n_imputers + fj block

  size_t n_rows() const { return y.size(); }
};

/// One design row per hidden cell, in row-major cell order: the K candidate
/// values for that cell followed by the column-metadata block; the response
/// is the hidden ground truth.
MetaTrainingSet assemble_training_set(const std::vector<DataMatrix>& completions,
                                      const Mask& mask, const FjInfo& fj);

struct MetaModel {
  std::vector<ImputerKind> roster;
  FjInfo fj;
  size_t n_cols = 0;
  double ridge_epsilon = 1e-6;
  std::vector<double> weights;  // length roster.size() + fj block
  double intercept = 0.0;
  double normal_residual = 0.0;
  double train_rmse = 0.0;
};

/// Ridge least squares on the assembled set; epsilon shrinks every
/// coefficient including the intercept.
MetaModel fit_meta(const MetaTrainingSet& ts, double ridge_epsilon,
                   const std::vector<ImputerKind>& roster);

/// candidates has one value per roster entry for the cell at column col.
double meta_predict_cell(const MetaModel& model, const std::vector<double>& candidates,
                         size_t col);

std::vector<double> predict_meta(const MetaModel& model,
                                 const std::vector<DataMatrix>& completions,
                                 const std::vector<MaskedCell>& cells);

/// Runs every roster imputer on m and fills each missing cell with the
/// meta-model prediction over their candidate values.
DataMatrix mib_complete(const MetaModel& model,
                        const std::vector<std::unique_ptr<FittedImputer>>& imputers,
                        const DataMatrix& m);

std::string serialize_meta(const MetaModel& model);
MetaModel parse_meta(const std::string& text);

}  // namespace mib
