#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mib {

/// Row-major n x d numeric table with per-cell observedness. Missing cells
/// hold a quiet-NaN sentinel that no computation may read; everything that
/// consumes a DataMatrix checks `is_observed` first, so a stray read shows
/// up as NaN poisoning instead of a silent wrong number.
struct DataMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> observed;
  std::vector<std::string> column_names;
  std::optional<std::size_t> target_col;

  static double missing_sentinel() { return std::numeric_limits<double>::quiet_NaN(); }

  std::size_t index(std::size_t r, std::size_t c) const { return r * cols + c; }
  double at(std::size_t r, std::size_t c) const { return values[index(r, c)]; }
  bool is_observed(std::size_t r, std::size_t c) const { return observed[index(r, c)] != 0; }

  void set(std::size_t r, std::size_t c, double v) {
    values[index(r, c)] = v;
    observed[index(r, c)] = 1;
  }
  void set_missing(std::size_t r, std::size_t c) {
    values[index(r, c)] = missing_sentinel();
    observed[index(r, c)] = 0;
  }

  std::size_t observed_count() const;
  std::size_t missing_count() const { return rows * cols - observed_count(); }
  bool fully_observed() const { return missing_count() == 0; }
};

/// All-observed zero matrix with generated column names c0..c{d-1}.
DataMatrix make_matrix(std::size_t rows, std::size_t cols);

/// Copy of the selected rows, in the given order. Column metadata carries over.
DataMatrix select_rows(const DataMatrix& m, const std::vector<std::size_t>& row_ids);

/// Per-column mean and population standard deviation (divisor = observed
/// count), computed over observed cells only. Columns with no observed cells
/// or no spread are recorded with std 0 and handled at apply time.
struct StandardizationParams {
  std::vector<double> means;
  std::vector<double> stds;
};

StandardizationParams fit_standardizer(const DataMatrix& m);

/// Observed cells map to (v - mean) / std; std=0 columns map to 0.
/// Observedness is unchanged.
DataMatrix apply_standardizer(const DataMatrix& m, const StandardizationParams& p);

/// Inverse of apply_standardizer on observed cells (exact for std=0 columns
/// only up to the constant; those come back as the stored mean).
DataMatrix invert_standardizer(const DataMatrix& m, const StandardizationParams& p);

/// Row -> fold assignment from a seeded shuffle followed by a contiguous
/// split. Fold sizes differ by at most one.
struct FoldPlan {
  std::vector<std::size_t> assignments;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> fold_rows(std::size_t fold) const;
  std::vector<std::size_t> complement_rows(std::size_t fold) const;
};

FoldPlan make_fold_plan(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace mib
