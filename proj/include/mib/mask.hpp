#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mib/data_matrix.hpp"

namespace mib {

struct MaskedCell {
  size_t row = 0;
  size_t col = 0;
  double truth = 0.0;
};

/// Record of which observed cells were artificially hidden, with their
/// original values, so masked-cell errors can be scored later.
struct Mask {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<uint8_t> hidden;  // rows*cols grid, 1 = hidden by this mask
  std::vector<double> truth;    // valid where hidden
  uint64_t seed = 0;
  double rate = 0.0;

  bool is_hidden(size_t i, size_t j) const { return hidden[i * cols + j] != 0; }
  std::vector<MaskedCell> cells() const;
  size_t count() const;
};

/// Hides each eligible cell of m independently with probability rate.
/// Eligible = currently observed and not the excluded column (pass the
/// target column there, or SIZE_MAX to allow every column). One uniform
/// draw is consumed per eligible cell, scanning rows outer, columns inner,
/// so the hidden set depends only on layout, seed, and rate.
Mask apply_mcar_mask(DataMatrix& m, double rate, uint64_t seed,
                     size_t excluded_col = SIZE_MAX);

std::string render_mask(const Mask& mask);
Mask parse_mask(const std::string& text, size_t rows, size_t cols);
void write_mask(const Mask& mask, const std::string& path);
Mask load_mask(const std::string& path, size_t rows, size_t cols);

}  // namespace mib
