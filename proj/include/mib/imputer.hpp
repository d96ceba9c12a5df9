#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mib/data_matrix.hpp"
#include "mib/trees.hpp"

namespace mib {

enum class ImputerKind {
  Mean,
  Median,
  Mode,
  Knn,
  MatrixFactorization,
  GradientBoostedTrees,
  Autoencoder,
  Gain,
};

constexpr size_t kImputerKindCount = 8;

const std::array<ImputerKind, kImputerKindCount>& all_imputer_kinds();
const char* imputer_name(ImputerKind kind);
std::optional<ImputerKind> imputer_kind_from_name(const std::string& name);
size_t imputer_kind_index(ImputerKind kind);
std::string valid_imputer_names();

struct ImputerSpec {
  ImputerKind kind = ImputerKind::Mean;
  uint64_t seed = 0;

  size_t knn_k = 5;

  size_t mf_rank = 0;  // 0 resolves to min(8, d-1) at fit time
  double mf_reg = 0.1;
  double mf_lr = 0.01;
  size_t mf_epochs = 200;

  size_t gbt_trees = 100;
  size_t gbt_depth = 3;
  double gbt_lr = 0.3;

  size_t ae_hidden = 0;  // 0 resolves to max(2, ceil(d/2))
  size_t ae_epochs = 200;
  size_t ae_batch = 64;
  double ae_lr = 0.01;

  double gain_hint_rate = 0.9;
  double gain_alpha = 10.0;
  size_t gain_epochs = 0;  // 0 sizes epochs for about 2000 generator steps
  size_t gain_batch = 64;
  double gain_lr = 0.01;

  std::string name() const { return imputer_name(kind); }
};

/// A trained base imputer. transform copies the input, lets the concrete
/// kind fill every missing cell, and enforces the shared contract: observed
/// cells bit-identical to the input, all outputs finite.
class FittedImputer {
 public:
  explicit FittedImputer(ImputerSpec spec, size_t n_cols)
      : spec_(std::move(spec)), n_cols_(n_cols) {}
  virtual ~FittedImputer() = default;

  const ImputerSpec& spec() const { return spec_; }
  size_t n_cols() const { return n_cols_; }

  DataMatrix transform(const DataMatrix& m) const;

 protected:
  // Writes a value into every unobserved cell of m (values only; the
  // transform wrapper flips observedness afterwards).
  virtual void fill_missing(DataMatrix& m) const = 0;

 private:
  ImputerSpec spec_;
  size_t n_cols_;
};

std::unique_ptr<FittedImputer> fit_imputer(const ImputerSpec& spec,
                                           const DataMatrix& train);

/// Per-column means over observed cells; zero-observed columns give 0 with
/// a warning when warn_degenerate is set.
std::vector<double> column_means(const DataMatrix& m, bool warn_degenerate = false);

/// Mean, median, or mode of each column, stored at fit time.
class ColumnStatImputer : public FittedImputer {
 public:
  ColumnStatImputer(ImputerSpec spec, const DataMatrix& train);
  const std::vector<double>& stats() const { return stats_; }

 protected:
  void fill_missing(DataMatrix& m) const override;

 private:
  std::vector<double> stats_;
};

double column_median(std::vector<double> vals);  // lower middle on even length
double column_mode(std::vector<double> vals);    // ties go to the smallest value

class KnnImputer : public FittedImputer {
 public:
  KnnImputer(ImputerSpec spec, const DataMatrix& train);

  /// Mean of the k nearest training rows' values in column col, where
  /// distance is sqrt(d/|S| * sum over shared observed coords of the squared
  /// difference). Rows sharing no coordinates with the query are skipped;
  /// with no usable neighbor at all the column mean is returned.
  double impute_cell(const DataMatrix& m, size_t row, size_t col) const;

 protected:
  void fill_missing(DataMatrix& m) const override;

 private:
  DataMatrix train_;
  std::vector<double> col_means_;
};

class MfImputer : public FittedImputer {
 public:
  MfImputer(ImputerSpec spec, const DataMatrix& train);
  const std::vector<double>& loss_curve() const { return loss_curve_; }
  size_t rank() const { return rank_; }

 protected:
  void fill_missing(DataMatrix& m) const override;

 private:
  std::vector<double> v_;  // d x rank factor matrix
  size_t rank_ = 0;
  std::vector<double> loss_curve_;  // objective after each epoch, [0] = before training
};

class GbtImputer : public FittedImputer {
 public:
  GbtImputer(ImputerSpec spec, const DataMatrix& train);

 protected:
  void fill_missing(DataMatrix& m) const override;

 private:
  struct ColumnModel {
    bool has_ensemble = false;
    BoostedModel ensemble;
    double fallback = 0.0;  // used when no ensemble was trained
  };
  std::vector<ColumnModel> models_;
  std::vector<double> fill_means_;  // training means used to fill predictors
};

}  // namespace mib
