#include "mib/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mib/parallel.hpp"
#include "mib/rng.hpp"

namespace mib {
namespace {

// Gains below this are treated as zero so constant-response nodes do not
// split on floating-point noise.
constexpr double MIN_GAIN = 1e-12;

struct SplitChoice {
  bool found = false;
  size_t feature = SIZE_MAX;
  double threshold = 0.0;
  double gain = 0.0;
};

struct Builder {
  const std::vector<double>& x;
  size_t n;
  size_t p;
  const std::vector<double>& y;
  TreeParams params;
  std::vector<size_t> rows;
  std::vector<TreeNode> nodes;
  SplitMix64 rng;
  size_t features_per_split;

  Builder(const std::vector<double>& x_, size_t n_, size_t p_,
          const std::vector<double>& y_, const TreeParams& params_)
      : x(x_), n(n_), p(p_), y(y_), params(params_), rng(params_.seed) {
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), size_t{0});
    double frac = params.feature_subsample;
    size_t m = static_cast<size_t>(std::ceil(frac * static_cast<double>(p)));
    features_per_split = std::min(std::max<size_t>(m, 1), p);
  }

  // Best split for one feature over rows[begin, end). Rows are ordered by
  // (value, row id) before the prefix scan so the summation order, and with
  // it every floating-point comparison downstream, is reproducible.
  SplitChoice eval_feature(size_t f, size_t begin, size_t end) const {
    const size_t m = end - begin;
    std::vector<std::pair<double, size_t>> vals(m);
    for (size_t i = 0; i < m; ++i) {
      const size_t r = rows[begin + i];
      vals[i] = {x[r * p + f], r};
    }
    std::sort(vals.begin(), vals.end());
    double total = 0.0;
    for (size_t i = 0; i < m; ++i) total += y[vals[i].second];

    SplitChoice best;
    best.feature = f;
    double left = 0.0;
    for (size_t i = 1; i < m; ++i) {
      left += y[vals[i - 1].second];
      if (vals[i].first == vals[i - 1].first) continue;
      if (i < params.min_samples_leaf || m - i < params.min_samples_leaf) continue;
      const double right = total - left;
      const double gain = left * left / static_cast<double>(i) +
                          right * right / static_cast<double>(m - i) -
                          total * total / static_cast<double>(m);
      if (gain > MIN_GAIN && (!best.found || gain > best.gain)) {
        best.found = true;
        best.gain = gain;
        const double lo = vals[i - 1].first;
        best.threshold = lo + (vals[i].first - lo) / 2.0;
      }
    }
    return best;
  }

  SplitChoice find_split(size_t begin, size_t end) {
    std::vector<size_t> feats;
    if (features_per_split >= p) {
      feats.resize(p);
      std::iota(feats.begin(), feats.end(), size_t{0});
    } else {
      // One subsample draw per split, consumed in build order regardless of
      // how the per-feature evaluations are scheduled.
      std::vector<size_t> pool(p);
      std::iota(pool.begin(), pool.end(), size_t{0});
      for (size_t i = 0; i < features_per_split; ++i) {
        const size_t j = i + static_cast<size_t>(rng.below(p - i));
        std::swap(pool[i], pool[j]);
      }
      feats.assign(pool.begin(), pool.begin() + features_per_split);
      std::sort(feats.begin(), feats.end());
    }
    std::vector<SplitChoice> per_feat(feats.size());
    par_for(feats.size(), [&](size_t t) { per_feat[t] = eval_feature(feats[t], begin, end); });
    SplitChoice best;
    for (const auto& c : per_feat) {
      if (c.found && (!best.found || c.gain > best.gain)) best = c;
    }
    return best;
  }

  double range_mean(size_t begin, size_t end) const {
    double s = 0.0;
    for (size_t i = begin; i < end; ++i) s += y[rows[i]];
    return s / static_cast<double>(end - begin);
  }

  size_t build(size_t begin, size_t end, size_t depth) {
    const size_t idx = nodes.size();
    nodes.emplace_back();
    const size_t m = end - begin;
    if (depth >= params.max_depth || m < 2 * params.min_samples_leaf) {
      nodes[idx].value = range_mean(begin, end);
      return idx;
    }
    SplitChoice split = find_split(begin, end);
    if (!split.found) {
      nodes[idx].value = range_mean(begin, end);
      return idx;
    }
    auto mid = std::stable_partition(
        rows.begin() + static_cast<ptrdiff_t>(begin),
        rows.begin() + static_cast<ptrdiff_t>(end),
        [&](size_t r) { return x[r * p + split.feature] <= split.threshold; });
    const size_t n_left = static_cast<size_t>(mid - (rows.begin() + static_cast<ptrdiff_t>(begin)));
    if (n_left == 0 || n_left == m) {  // threshold rounding collapsed a side
      nodes[idx].value = range_mean(begin, end);
      return idx;
    }
    nodes[idx].feature = split.feature;
    nodes[idx].threshold = split.threshold;
    const size_t l = build(begin, begin + n_left, depth + 1);
    const size_t r = build(begin + n_left, end, depth + 1);
    nodes[idx].left = l;
    nodes[idx].right = r;
    return idx;
  }
};

void check_dims(size_t n, size_t fit_p, size_t have, const char* kind) {
  if (fit_p != have)
    throw std::runtime_error(std::string(kind) + " predict: expected " +
                             std::to_string(fit_p) + " features, got " +
                             std::to_string(have));
  (void)n;
}

}  // namespace

double RegressionTree::predict_row(const double* row) const {
  size_t idx = 0;
  while (!nodes[idx].is_leaf())
    idx = row[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                          : nodes[idx].right;
  return nodes[idx].value;
}

double ForestModel::predict_row(const double* row) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict_row(row);
  return s / static_cast<double>(trees.size());
}

double BoostedModel::predict_row(const double* row) const {
  double s = base_score;
  for (const auto& t : trees) s += learning_rate * t.predict_row(row);
  return s;
}

RegressionTree tree_fit(const std::vector<double>& x, size_t n, size_t p,
                        const std::vector<double>& y, const TreeParams& params) {
  if (n == 0 || p == 0) throw std::runtime_error("tree_fit: empty input");
  Builder b(x, n, p, y, params);
  b.build(0, n, 0);
  RegressionTree t;
  t.nodes = std::move(b.nodes);
  t.n_features = p;
  return t;
}

ForestModel forest_fit(const std::vector<double>& x, size_t n, size_t p,
                       const std::vector<double>& y, const ForestParams& params) {
  if (n == 0 || p == 0) throw std::runtime_error("forest_fit: empty input");
  if (params.n_trees == 0) throw std::runtime_error("forest_fit: n_trees must be >= 1");
  ForestModel model;
  model.n_features = p;
  model.trees.resize(params.n_trees);
  // Per-tree seeds are derived from the tree index, so training order does
  // not matter and the forest is identical at any thread count.
  par_for(params.n_trees, [&](size_t t) {
    SplitMix64 boot(derive_seed(params.seed, 2 * t));
    std::vector<double> bx(n * p);
    std::vector<double> by(n);
    for (size_t i = 0; i < n; ++i) {
      const size_t r = static_cast<size_t>(boot.below(n));
      std::copy(x.begin() + static_cast<ptrdiff_t>(r * p),
                x.begin() + static_cast<ptrdiff_t>((r + 1) * p),
                bx.begin() + static_cast<ptrdiff_t>(i * p));
      by[i] = y[r];
    }
    TreeParams tp;
    tp.max_depth = params.max_depth;
    tp.min_samples_leaf = params.min_samples_leaf;
    tp.feature_subsample = params.feature_subsample;
    tp.seed = derive_seed(params.seed, 2 * t + 1);
    model.trees[t] = tree_fit(bx, n, p, by, tp);
  });
  return model;
}

BoostedModel boost_fit(const std::vector<double>& x, size_t n, size_t p,
                       const std::vector<double>& y, const BoostParams& params) {
  if (n == 0 || p == 0) throw std::runtime_error("boost_fit: empty input");
  if (params.n_trees == 0) throw std::runtime_error("boost_fit: n_trees must be >= 1");
  if (params.learning_rate < 0.0)
    throw std::runtime_error("boost_fit: learning_rate must be >= 0");
  BoostedModel model;
  model.n_features = p;
  model.learning_rate = params.learning_rate;
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += y[i];
  mean /= static_cast<double>(n);
  model.base_score = mean;

  std::vector<double> resid(n);
  for (size_t i = 0; i < n; ++i) resid[i] = y[i] - mean;
  auto record_sse = [&]() {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += resid[i] * resid[i];
    model.train_sse.push_back(s);
  };
  record_sse();
  for (size_t t = 0; t < params.n_trees; ++t) {
    TreeParams tp;
    tp.max_depth = params.max_depth;
    tp.min_samples_leaf = params.min_samples_leaf;
    tp.feature_subsample = 1.0;
    tp.seed = derive_seed(params.seed, t);
    RegressionTree tree = tree_fit(x, n, p, resid, tp);
    std::vector<double> fitted(n);
    par_for(n, [&](size_t i) { fitted[i] = tree.predict_row(&x[i * p]); });
    for (size_t i = 0; i < n; ++i) resid[i] -= params.learning_rate * fitted[i];
    model.trees.push_back(std::move(tree));
    record_sse();
  }
  return model;
}

std::vector<double> predict(const RegressionTree& m, const std::vector<double>& x,
                            size_t n) {
  check_dims(n, m.n_features, n ? x.size() / n : m.n_features, "tree");
  std::vector<double> out(n);
  par_for(n, [&](size_t i) { out[i] = m.predict_row(&x[i * m.n_features]); });
  return out;
}

std::vector<double> predict(const ForestModel& m, const std::vector<double>& x,
                            size_t n) {
  check_dims(n, m.n_features, n ? x.size() / n : m.n_features, "forest");
  std::vector<double> out(n);
  par_for(n, [&](size_t i) { out[i] = m.predict_row(&x[i * m.n_features]); });
  return out;
}

std::vector<double> predict(const BoostedModel& m, const std::vector<double>& x,
                            size_t n) {
  check_dims(n, m.n_features, n ? x.size() / n : m.n_features, "boosted");
  std::vector<double> out(n);
  par_for(n, [&](size_t i) { out[i] = m.predict_row(&x[i * m.n_features]); });
  return out;
}

}  // namespace mib
