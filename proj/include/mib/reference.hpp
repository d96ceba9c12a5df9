#pragma once

#include <vector>

#include "mib/data_matrix.hpp"
#include "mib/trees.hpp"

namespace mib {

/// Plain serial implementations of the performance-sensitive kernels.
/// They share the exact numeric contracts of the parallel versions (same
/// formulas, same summation order, same tie-breaks) but are written as
/// straight-line loops, so tests can demand exact agreement and the
/// benchmark target can measure the parallel speedup against them.

double ref_mean(const std::vector<double>& vals);
double ref_median(std::vector<double> vals);
double ref_mode(std::vector<double> vals);

/// Exhaustive nearest-neighbor imputation of one cell.
double ref_knn_cell(const DataMatrix& train, const DataMatrix& query, size_t row,
                    size_t col, size_t k);

/// Serial completion of every missing cell via ref_knn_cell.
DataMatrix ref_knn_complete(const DataMatrix& train, const DataMatrix& m, size_t k);

/// Exhaustive split search over every (feature, boundary) pair, recursing
/// serially; no feature subsampling.
RegressionTree ref_tree_fit(const std::vector<double>& x, size_t n, size_t p,
                            const std::vector<double>& y, size_t max_depth,
                            size_t min_samples_leaf);

/// Gradient descent on ||A w - y||^2 + eps ||w||^2 with a step size backed
/// off from the Gram trace; long runs converge to the ridge solution.
std::vector<double> ref_ridge_gd(const std::vector<double>& a, size_t n, size_t p,
                                 const std::vector<double>& y, double eps,
                                 size_t steps);

}  // namespace mib
