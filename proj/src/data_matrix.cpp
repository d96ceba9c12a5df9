#include "mib/data_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "mib/errors.hpp"
#include "mib/rng.hpp"

namespace mib {

void warn(const std::string& msg) { std::fprintf(stderr, "warning: %s\n", msg.c_str()); }

std::size_t DataMatrix::observed_count() const {
  std::size_t n = 0;
  for (auto o : observed) n += o;
  return n;
}

DataMatrix make_matrix(std::size_t rows, std::size_t cols) {
  DataMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values.assign(rows * cols, 0.0);
  m.observed.assign(rows * cols, 1);
  m.column_names.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) m.column_names[c] = "c" + std::to_string(c);
  return m;
}

DataMatrix select_rows(const DataMatrix& m, const std::vector<std::size_t>& row_ids) {
  DataMatrix out;
  out.rows = row_ids.size();
  out.cols = m.cols;
  out.values.resize(out.rows * out.cols);
  out.observed.resize(out.rows * out.cols);
  out.column_names = m.column_names;
  out.target_col = m.target_col;
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    const std::size_t src = row_ids[i] * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) {
      out.values[i * out.cols + c] = m.values[src + c];
      out.observed[i * out.cols + c] = m.observed[src + c];
    }
  }
  return out;
}

StandardizationParams fit_standardizer(const DataMatrix& m) {
  StandardizationParams p;
  p.means.assign(m.cols, 0.0);
  p.stds.assign(m.cols, 0.0);
  for (std::size_t c = 0; c < m.cols; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (m.is_observed(r, c)) {
        sum += m.at(r, c);
        ++n;
      }
    }
    if (n == 0) {
      warn("column " + m.column_names[c] + " has no observed cells; standardizes to 0");
      continue;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (m.is_observed(r, c)) {
        const double dv = m.at(r, c) - mean;
        ss += dv * dv;
      }
    }
    p.means[c] = mean;
    p.stds[c] = std::sqrt(ss / static_cast<double>(n));
  }
  return p;
}

DataMatrix apply_standardizer(const DataMatrix& m, const StandardizationParams& p) {
  if (p.means.size() != m.cols) {
    throw DataError("standardizer has " + std::to_string(p.means.size()) +
                    " columns, matrix has " + std::to_string(m.cols));
  }
  DataMatrix out = m;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (!m.is_observed(r, c)) continue;
      out.values[out.index(r, c)] =
          p.stds[c] > 0.0 ? (m.at(r, c) - p.means[c]) / p.stds[c] : 0.0;
    }
  }
  return out;
}

DataMatrix invert_standardizer(const DataMatrix& m, const StandardizationParams& p) {
  if (p.means.size() != m.cols) {
    throw DataError("standardizer has " + std::to_string(p.means.size()) +
                    " columns, matrix has " + std::to_string(m.cols));
  }
  DataMatrix out = m;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (!m.is_observed(r, c)) continue;
      out.values[out.index(r, c)] = p.stds[c] > 0.0
                                        ? m.at(r, c) * p.stds[c] + p.means[c]
                                        : p.means[c];
    }
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignments.size(); ++r) {
    if (assignments[r] == fold) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::complement_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignments.size(); ++r) {
    if (assignments[r] != fold) out.push_back(r);
  }
  return out;
}

FoldPlan make_fold_plan(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw ConfigError("fold count " + std::to_string(k) + " must be in [2, n=" +
                      std::to_string(n) + "]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  shuffle_inplace(order, rng);

  FoldPlan plan;
  plan.assignments.assign(n, 0);
  plan.k = k;
  plan.seed = seed;
  const std::size_t base = n / k;
  const std::size_t extra = n % k;  // first `extra` folds take one more row
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) plan.assignments[order[pos++]] = f;
  }
  return plan;
}

}  // namespace mib
