#include "mib/imputer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mib/deep_imputers.hpp"
#include "mib/errors.hpp"
#include "mib/linalg.hpp"
#include "mib/parallel.hpp"
#include "mib/rng.hpp"

namespace mib {

const std::array<ImputerKind, kImputerKindCount>& all_imputer_kinds() {
  static const std::array<ImputerKind, kImputerKindCount> kinds = {
      ImputerKind::Mean,     ImputerKind::Median,
      ImputerKind::Mode,     ImputerKind::Knn,
      ImputerKind::MatrixFactorization, ImputerKind::GradientBoostedTrees,
      ImputerKind::Autoencoder, ImputerKind::Gain};
  return kinds;
}

const char* imputer_name(ImputerKind kind) {
  switch (kind) {
    case ImputerKind::Mean: return "mean";
    case ImputerKind::Median: return "median";
    case ImputerKind::Mode: return "mode";
    case ImputerKind::Knn: return "knn";
    case ImputerKind::MatrixFactorization: return "mf";
    case ImputerKind::GradientBoostedTrees: return "gbt";
    case ImputerKind::Autoencoder: return "autoencoder";
    case ImputerKind::Gain: return "gain";
  }
  return "unknown";
}

std::optional<ImputerKind> imputer_kind_from_name(const std::string& name) {
  for (ImputerKind k : all_imputer_kinds())
    if (name == imputer_name(k)) return k;
  return std::nullopt;
}

size_t imputer_kind_index(ImputerKind kind) {
  const auto& kinds = all_imputer_kinds();
  for (size_t i = 0; i < kinds.size(); ++i)
    if (kinds[i] == kind) return i;
  return kinds.size();
}

std::string valid_imputer_names() {
  std::string out;
  for (ImputerKind k : all_imputer_kinds()) {
    if (!out.empty()) out += ", ";
    out += imputer_name(k);
  }
  return out;
}

DataMatrix FittedImputer::transform(const DataMatrix& m) const {
  if (m.cols != n_cols_)
    throw DataError(std::string(imputer_name(spec_.kind)) + " transform: fitted on " +
                    std::to_string(n_cols_) + " columns, input has " +
                    std::to_string(m.cols));
  DataMatrix out = m;
  fill_missing(out);
  for (size_t i = 0; i < out.rows; ++i) {
    for (size_t j = 0; j < out.cols; ++j) {
      if (!std::isfinite(out.values[out.index(i, j)]))
        throw std::runtime_error(std::string(imputer_name(spec_.kind)) +
                                 " transform produced a non-finite value at row " +
                                 std::to_string(i) + ", column " + std::to_string(j));
    }
  }
  std::fill(out.observed.begin(), out.observed.end(), uint8_t{1});
  return out;
}

std::vector<double> column_means(const DataMatrix& m, bool warn_degenerate) {
  std::vector<double> means(m.cols, 0.0);
  for (size_t j = 0; j < m.cols; ++j) {
    double s = 0.0;
    size_t cnt = 0;
    for (size_t i = 0; i < m.rows; ++i) {
      if (m.is_observed(i, j)) {
        s += m.at(i, j);
        ++cnt;
      }
    }
    if (cnt == 0) {
      if (warn_degenerate)
        warn("column " + m.column_names[j] + " has no observed cells; imputing 0");
      means[j] = 0.0;
    } else {
      means[j] = s / static_cast<double>(cnt);
    }
  }
  return means;
}

double column_median(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end());
  return vals[(vals.size() - 1) / 2];
}

double column_mode(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end());
  double best = vals[0];
  size_t best_count = 0;
  size_t i = 0;
  while (i < vals.size()) {
    size_t j = i;
    while (j < vals.size() && vals[j] == vals[i]) ++j;
    if (j - i > best_count) {
      best_count = j - i;
      best = vals[i];
    }
    i = j;
  }
  return best;
}

ColumnStatImputer::ColumnStatImputer(ImputerSpec spec, const DataMatrix& train)
    : FittedImputer(std::move(spec), train.cols) {
  stats_.assign(train.cols, 0.0);
  for (size_t j = 0; j < train.cols; ++j) {
    std::vector<double> vals;
    for (size_t i = 0; i < train.rows; ++i)
      if (train.is_observed(i, j)) vals.push_back(train.at(i, j));
    if (vals.empty()) {
      warn("column " + train.column_names[j] + " has no observed cells; imputing 0");
      continue;
    }
    switch (this->spec().kind) {
      case ImputerKind::Mean: {
        double s = 0.0;
        for (double v : vals) s += v;
        stats_[j] = s / static_cast<double>(vals.size());
        break;
      }
      case ImputerKind::Median:
        stats_[j] = column_median(std::move(vals));
        break;
      case ImputerKind::Mode:
        stats_[j] = column_mode(std::move(vals));
        break;
      default:
        throw std::runtime_error("ColumnStatImputer: unsupported kind");
    }
  }
}

void ColumnStatImputer::fill_missing(DataMatrix& m) const {
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j)
      if (!m.is_observed(i, j)) m.values[m.index(i, j)] = stats_[j];
}

KnnImputer::KnnImputer(ImputerSpec spec, const DataMatrix& train)
    : FittedImputer(std::move(spec), train.cols), train_(train) {
  if (this->spec().knn_k < 1) throw ConfigError("knn k must be >= 1");
  col_means_ = column_means(train_, true);
}

double KnnImputer::impute_cell(const DataMatrix& m, size_t row, size_t col) const {
  const size_t d = n_cols();
  // (scaled squared distance, training row); squared values order the same
  // way as the distances themselves.
  std::vector<std::pair<double, size_t>> cand;
  for (size_t t = 0; t < train_.rows; ++t) {
    if (!train_.is_observed(t, col)) continue;
    size_t shared = 0;
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) {
      if (m.is_observed(row, j) && train_.is_observed(t, j)) {
        const double diff = m.at(row, j) - train_.at(t, j);
        s += diff * diff;
        ++shared;
      }
    }
    if (shared == 0) continue;
    cand.emplace_back(s * static_cast<double>(d) / static_cast<double>(shared), t);
  }
  if (cand.empty()) return col_means_[col];
  std::sort(cand.begin(), cand.end());  // distance ties go to the lower row id
  const size_t k = std::min<size_t>(spec().knn_k, cand.size());
  double sum = 0.0;
  for (size_t i = 0; i < k; ++i) sum += train_.at(cand[i].second, col);
  return sum / static_cast<double>(k);
}

void KnnImputer::fill_missing(DataMatrix& m) const {
  std::vector<std::pair<size_t, size_t>> cells;
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j)
      if (!m.is_observed(i, j)) cells.emplace_back(i, j);
  // Distances read observed cells only, so concurrent fills cannot see each
  // other's writes and every cell's value is order-independent.
  par_for(cells.size(), [&](size_t c) {
    const auto [i, j] = cells[c];
    m.values[m.index(i, j)] = impute_cell(m, i, j);
  });
}

MfImputer::MfImputer(ImputerSpec spec, const DataMatrix& train)
    : FittedImputer(std::move(spec), train.cols) {
  const ImputerSpec& sp = this->spec();
  const size_t n = train.rows;
  const size_t d = train.cols;
  const size_t cap = std::min(n, d);
  if (sp.mf_rank == 0) {
    rank_ = std::min<size_t>(8, d >= 2 ? d - 1 : 1);
    rank_ = std::max<size_t>(1, std::min(rank_, cap));
  } else {
    if (sp.mf_rank > cap)
      throw ConfigError("mf rank " + std::to_string(sp.mf_rank) +
                        " exceeds min(rows, cols) = " + std::to_string(cap));
    rank_ = sp.mf_rank;
  }
  if (!(sp.mf_lr > 0.0)) throw ConfigError("mf lr must be > 0");
  if (!(sp.mf_reg > 0.0)) throw ConfigError("mf reg must be > 0");

  SplitMix64 rng(sp.seed);
  std::vector<double> u(n * rank_);
  v_.resize(d * rank_);
  for (auto& w : u) w = rng.next_double(-0.01, 0.01);
  for (auto& w : v_) w = rng.next_double(-0.01, 0.01);

  std::vector<std::pair<size_t, size_t>> cells;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j)
      if (train.is_observed(i, j)) cells.emplace_back(i, j);

  auto objective = [&]() {
    double s = 0.0;
    for (const auto& [i, j] : cells) {
      double pred = 0.0;
      for (size_t h = 0; h < rank_; ++h) pred += u[i * rank_ + h] * v_[j * rank_ + h];
      const double e = train.at(i, j) - pred;
      s += e * e;
    }
    double norm = 0.0;
    for (double w : u) norm += w * w;
    for (double w : v_) norm += w * w;
    return s + sp.mf_reg * norm;
  };
  loss_curve_.push_back(objective());

  std::vector<std::pair<size_t, size_t>> order = cells;
  for (size_t epoch = 0; epoch < sp.mf_epochs; ++epoch) {
    shuffle_inplace(order, rng);
    for (const auto& [i, j] : order) {
      double pred = 0.0;
      for (size_t h = 0; h < rank_; ++h) pred += u[i * rank_ + h] * v_[j * rank_ + h];
      const double e = train.at(i, j) - pred;
      for (size_t h = 0; h < rank_; ++h) {
        const double uo = u[i * rank_ + h];
        const double vo = v_[j * rank_ + h];
        u[i * rank_ + h] += sp.mf_lr * (e * vo - sp.mf_reg * uo);
        v_[j * rank_ + h] += sp.mf_lr * (e * uo - sp.mf_reg * vo);
      }
    }
    loss_curve_.push_back(objective());
  }
}

void MfImputer::fill_missing(DataMatrix& m) const {
  const size_t d = n_cols();
  // Each row's factor vector is re-derived from its observed cells by a
  // small ridge solve against V, which works for any input matrix, not just
  // the one seen at fit time.
  par_for(m.rows, [&](size_t i) {
    std::vector<size_t> obs;
    for (size_t j = 0; j < d; ++j)
      if (m.is_observed(i, j)) obs.push_back(j);
    std::vector<double> u(rank_, 0.0);
    if (!obs.empty()) {
      std::vector<double> a(obs.size() * rank_);
      std::vector<double> y(obs.size());
      for (size_t t = 0; t < obs.size(); ++t) {
        for (size_t h = 0; h < rank_; ++h) a[t * rank_ + h] = v_[obs[t] * rank_ + h];
        y[t] = m.at(i, obs[t]);
      }
      u = ridge_normal_solve(a, obs.size(), rank_, y, spec().mf_reg).w;
    }
    for (size_t j = 0; j < d; ++j) {
      if (m.is_observed(i, j)) continue;
      double pred = 0.0;
      for (size_t h = 0; h < rank_; ++h) pred += u[h] * v_[j * rank_ + h];
      m.values[m.index(i, j)] = pred;
    }
  });
}

GbtImputer::GbtImputer(ImputerSpec spec, const DataMatrix& train)
    : FittedImputer(std::move(spec), train.cols) {
  const ImputerSpec& sp = this->spec();
  if (sp.gbt_trees < 1) throw ConfigError("gbt trees must be >= 1");
  if (sp.gbt_depth < 1) throw ConfigError("gbt depth must be >= 1");
  if (!(sp.gbt_lr > 0.0)) throw ConfigError("gbt lr must be > 0");
  const size_t n = train.rows;
  const size_t d = train.cols;
  fill_means_ = column_means(train, true);
  std::vector<double> filled(n * d);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j)
      filled[i * d + j] = train.is_observed(i, j) ? train.at(i, j) : fill_means_[j];

  models_.resize(d);
  par_for(d, [&](size_t j) {
    std::vector<size_t> rows_obs;
    for (size_t i = 0; i < n; ++i)
      if (train.is_observed(i, j)) rows_obs.push_back(i);
    ColumnModel& cm = models_[j];
    if (rows_obs.empty()) {
      cm.fallback = 0.0;
      return;
    }
    if (rows_obs.size() == n) {  // nothing to impute at fit time
      cm.fallback = fill_means_[j];
      return;
    }
    const size_t p = d - 1;
    std::vector<double> x(rows_obs.size() * p);
    std::vector<double> y(rows_obs.size());
    for (size_t t = 0; t < rows_obs.size(); ++t) {
      const size_t i = rows_obs[t];
      size_t c = 0;
      for (size_t jj = 0; jj < d; ++jj) {
        if (jj == j) continue;
        x[t * p + c++] = filled[i * d + jj];
      }
      y[t] = train.at(i, j);
    }
    BoostParams bp;
    bp.n_trees = sp.gbt_trees;
    bp.max_depth = sp.gbt_depth;
    bp.learning_rate = sp.gbt_lr;
    bp.seed = derive_seed(sp.seed, j);
    cm.ensemble = boost_fit(x, rows_obs.size(), p, y, bp);
    cm.has_ensemble = true;
  });
}

void GbtImputer::fill_missing(DataMatrix& m) const {
  const size_t d = n_cols();
  std::vector<double> pred(m.rows * d);
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < d; ++j)
      pred[i * d + j] = m.is_observed(i, j) ? m.at(i, j) : fill_means_[j];

  par_for(d, [&](size_t j) {
    const ColumnModel& cm = models_[j];
    std::vector<double> row(d - 1);
    for (size_t i = 0; i < m.rows; ++i) {
      if (m.is_observed(i, j)) continue;
      double value = cm.fallback;
      if (cm.has_ensemble) {
        size_t c = 0;
        for (size_t jj = 0; jj < d; ++jj) {
          if (jj == j) continue;
          row[c++] = pred[i * d + jj];
        }
        value = cm.ensemble.predict_row(row.data());
      }
      m.values[m.index(i, j)] = value;
    }
  });
}

std::unique_ptr<FittedImputer> fit_imputer(const ImputerSpec& spec,
                                           const DataMatrix& train) {
  switch (spec.kind) {
    case ImputerKind::Mean:
    case ImputerKind::Median:
    case ImputerKind::Mode:
      return std::make_unique<ColumnStatImputer>(spec, train);
    case ImputerKind::Knn:
      return std::make_unique<KnnImputer>(spec, train);
    case ImputerKind::MatrixFactorization:
      return std::make_unique<MfImputer>(spec, train);
    case ImputerKind::GradientBoostedTrees:
      return std::make_unique<GbtImputer>(spec, train);
    case ImputerKind::Autoencoder:
      return make_autoencoder_imputer(spec, train);
    case ImputerKind::Gain:
      return make_gain_imputer(spec, train);
  }
  throw ConfigError("unknown imputer kind");
}

}  // namespace mib
