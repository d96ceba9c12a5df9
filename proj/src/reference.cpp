#include "mib/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mib {
namespace {

constexpr double MIN_GAIN = 1e-12;  // same cutoff as the tree builder

double node_mean(const std::vector<double>& y, const std::vector<size_t>& rows) {
  double s = 0.0;
  for (size_t r : rows) s += y[r];
  return s / static_cast<double>(rows.size());
}

struct RefBuilder {
  const std::vector<double>& x;
  size_t p;
  const std::vector<double>& y;
  size_t max_depth;
  size_t min_samples_leaf;
  std::vector<TreeNode> nodes;

  size_t build(std::vector<size_t> rows, size_t depth) {
    const size_t idx = nodes.size();
    nodes.emplace_back();
    const size_t m = rows.size();
    if (depth >= max_depth || m < 2 * min_samples_leaf) {
      nodes[idx].value = node_mean(y, rows);
      return idx;
    }

    bool found = false;
    size_t best_feature = 0;
    double best_threshold = 0.0;
    double best_gain = 0.0;
    for (size_t f = 0; f < p; ++f) {
      std::vector<std::pair<double, size_t>> vals;
      for (size_t r : rows) vals.emplace_back(x[r * p + f], r);
      std::sort(vals.begin(), vals.end());
      double total = 0.0;
      for (const auto& v : vals) total += y[v.second];
      for (size_t i = 1; i < m; ++i) {
        if (vals[i].first == vals[i - 1].first) continue;
        if (i < min_samples_leaf || m - i < min_samples_leaf) continue;
        double left = 0.0;
        for (size_t t = 0; t < i; ++t) left += y[vals[t].second];
        const double right = total - left;
        const double gain = left * left / static_cast<double>(i) +
                            right * right / static_cast<double>(m - i) -
                            total * total / static_cast<double>(m);
        if (gain > MIN_GAIN && (!found || gain > best_gain)) {
          found = true;
          best_gain = gain;
          best_feature = f;
          const double lo = vals[i - 1].first;
          best_threshold = lo + (vals[i].first - lo) / 2.0;
        }
      }
    }
    if (!found) {
      nodes[idx].value = node_mean(y, rows);
      return idx;
    }

    std::vector<size_t> left_rows, right_rows;
    for (size_t r : rows) {
      if (x[r * p + best_feature] <= best_threshold) left_rows.push_back(r);
      else right_rows.push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) {
      nodes[idx].value = node_mean(y, rows);
      return idx;
    }
    nodes[idx].feature = best_feature;
    nodes[idx].threshold = best_threshold;
    const size_t l = build(std::move(left_rows), depth + 1);
    const size_t r = build(std::move(right_rows), depth + 1);
    nodes[idx].left = l;
    nodes[idx].right = r;
    return idx;
  }
};

}  // namespace

double ref_mean(const std::vector<double>& vals) {
  double s = 0.0;
  for (double v : vals) s += v;
  return s / static_cast<double>(vals.size());
}

double ref_median(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end());
  return vals[(vals.size() - 1) / 2];
}

double ref_mode(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end());
  double best = vals[0];
  size_t best_count = 1;
  size_t run_start = 0;
  for (size_t i = 1; i <= vals.size(); ++i) {
    if (i == vals.size() || vals[i] != vals[run_start]) {
      if (i - run_start > best_count) {
        best_count = i - run_start;
        best = vals[run_start];
      }
      run_start = i;
    }
  }
  return best;
}

double ref_knn_cell(const DataMatrix& train, const DataMatrix& query, size_t row,
                    size_t col, size_t k) {
  const size_t d = train.cols;
  std::vector<std::pair<double, size_t>> cand;
  for (size_t t = 0; t < train.rows; ++t) {
    if (!train.is_observed(t, col)) continue;
    size_t shared = 0;
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) {
      if (query.is_observed(row, j) && train.is_observed(t, j)) {
        const double diff = query.at(row, j) - train.at(t, j);
        s += diff * diff;
        ++shared;
      }
    }
    if (shared == 0) continue;
    cand.emplace_back(s * static_cast<double>(d) / static_cast<double>(shared), t);
  }
  if (cand.empty()) {
    double s = 0.0;
    size_t cnt = 0;
    for (size_t i = 0; i < train.rows; ++i) {
      if (train.is_observed(i, col)) {
        s += train.at(i, col);
        ++cnt;
      }
    }
    return cnt ? s / static_cast<double>(cnt) : 0.0;
  }
  std::sort(cand.begin(), cand.end());
  const size_t take = std::min(k, cand.size());
  double sum = 0.0;
  for (size_t i = 0; i < take; ++i) sum += train.at(cand[i].second, col);
  return sum / static_cast<double>(take);
}

DataMatrix ref_knn_complete(const DataMatrix& train, const DataMatrix& m, size_t k) {
  DataMatrix out = m;
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j)
      if (!m.is_observed(i, j))
        out.values[out.index(i, j)] = ref_knn_cell(train, m, i, j, k);
  std::fill(out.observed.begin(), out.observed.end(), uint8_t{1});
  return out;
}

RegressionTree ref_tree_fit(const std::vector<double>& x, size_t n, size_t p,
                            const std::vector<double>& y, size_t max_depth,
                            size_t min_samples_leaf) {
  if (n == 0 || p == 0) throw std::runtime_error("ref_tree_fit: empty input");
  RefBuilder b{x, p, y, max_depth, min_samples_leaf, {}};
  std::vector<size_t> rows(n);
  for (size_t i = 0; i < n; ++i) rows[i] = i;
  b.build(std::move(rows), 0);
  RegressionTree t;
  t.nodes = std::move(b.nodes);
  t.n_features = p;
  return t;
}

std::vector<double> ref_ridge_gd(const std::vector<double>& a, size_t n, size_t p,
                                 const std::vector<double>& y, double eps,
                                 size_t steps) {
  double trace = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < p; ++j) trace += a[i * p + j] * a[i * p + j];
  const double lr = 0.45 / (trace + eps + 1.0);

  std::vector<double> w(p, 0.0);
  std::vector<double> resid(n);
  std::vector<double> grad(p);
  for (size_t step = 0; step < steps; ++step) {
    for (size_t i = 0; i < n; ++i) {
      double pred = 0.0;
      for (size_t j = 0; j < p; ++j) pred += a[i * p + j] * w[j];
      resid[i] = pred - y[i];
    }
    for (size_t j = 0; j < p; ++j) grad[j] = 2.0 * eps * w[j];
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < p; ++j) grad[j] += 2.0 * a[i * p + j] * resid[i];
    for (size_t j = 0; j < p; ++j) w[j] -= lr * grad[j];
  }
  return w;
}

}  // namespace mib
