#pragma once

#include <cstdint>
#include <vector>

namespace mib {

struct TreeNode {
  size_t feature = SIZE_MAX;  // SIZE_MAX marks a leaf
  double threshold = 0.0;
  size_t left = 0;
  size_t right = 0;
  double value = 0.0;

  bool is_leaf() const { return feature == SIZE_MAX; }
};

struct TreeParams {
  size_t max_depth = 3;
  size_t min_samples_leaf = 1;
  double feature_subsample = 1.0;  // fraction of features tried per split
  uint64_t seed = 0;
};

/// CART regression tree, nodes stored in depth-first preorder.
///
/// Split search maximizes the reduction in sum of squared errors. Candidate
/// thresholds are midpoints between consecutive distinct sorted feature
/// values; ties are broken toward the lower feature index, then the lower
/// threshold. Rows with value <= threshold go left.
struct RegressionTree {
  std::vector<TreeNode> nodes;
  size_t n_features = 0;

  double predict_row(const double* row) const;
};

struct ForestParams {
  size_t n_trees = 100;
  size_t max_depth = 8;
  size_t min_samples_leaf = 1;
  double feature_subsample = 1.0 / 3.0;
  uint64_t seed = 0;
};

/// Bagged trees: each tree sees a seeded bootstrap resample and subsamples
/// features per split. Prediction is the mean over trees.
struct ForestModel {
  std::vector<RegressionTree> trees;
  size_t n_features = 0;

  double predict_row(const double* row) const;
};

struct BoostParams {
  size_t n_trees = 100;
  size_t max_depth = 3;
  size_t min_samples_leaf = 1;
  double learning_rate = 0.3;
  uint64_t seed = 0;
};

/// Stagewise squared-loss boosting from a constant base score.
/// Prediction is base_score + lr * sum of tree outputs.
struct BoostedModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.3;
  double base_score = 0.0;
  std::vector<double> train_sse;  // after each round, starting with round 0
  size_t n_features = 0;

  double predict_row(const double* row) const;
};

/// x is n*p row-major and fully observed.
RegressionTree tree_fit(const std::vector<double>& x, size_t n, size_t p,
                        const std::vector<double>& y, const TreeParams& params);

ForestModel forest_fit(const std::vector<double>& x, size_t n, size_t p,
                       const std::vector<double>& y, const ForestParams& params);

BoostedModel boost_fit(const std::vector<double>& x, size_t n, size_t p,
                       const std::vector<double>& y, const BoostParams& params);

std::vector<double> predict(const RegressionTree& m, const std::vector<double>& x,
                            size_t n);
std::vector<double> predict(const ForestModel& m, const std::vector<double>& x,
                            size_t n);
std::vector<double> predict(const BoostedModel& m, const std::vector<double>& x,
                            size_t n);

}  // namespace mib
