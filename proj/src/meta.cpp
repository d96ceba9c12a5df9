#include "mib/meta.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mib/csv.hpp"
#include "mib/errors.hpp"
#include "mib/linalg.hpp"
#include "mib/parallel.hpp"

namespace mib {
namespace {

void fill_design_row(double* row, const std::vector<double>& candidates, size_t col,
                     size_t d, const FjInfo& fj) {
  const size_t k = candidates.size();
  for (size_t t = 0; t < k; ++t) row[t] = candidates[t];
  for (size_t j = 0; j < d; ++j) row[k + j] = j == col ? 1.0 : 0.0;
  if (fj.mode == FjMode::OneHotStats) {
    row[k + d] = fj.col_means[col];
    row[k + d + 1] = fj.col_stds[col];
  }
}

}  // namespace

const char* fj_mode_name(FjMode mode) {
  return mode == FjMode::OneHot ? "one-hot" : "one-hot+stats";
}

MetaTrainingSet assemble_training_set(const std::vector<DataMatrix>& completions,
                                      const Mask& mask, const FjInfo& fj) {
  if (completions.empty()) throw std::runtime_error("assemble: no completions");
  const size_t d = completions[0].cols;
  const size_t n = completions[0].rows;
  for (const auto& c : completions)
    if (c.rows != n || c.cols != d)
      throw std::runtime_error("assemble: completion shapes differ");
  if (mask.rows != n || mask.cols != d)
    throw std::runtime_error("assemble: mask shape differs from completions");
  if (fj.mode == FjMode::OneHotStats &&
      (fj.col_means.size() != d || fj.col_stds.size() != d))
    throw std::runtime_error("assemble: column stats missing for one-hot+stats mode");

  MetaTrainingSet ts;
  ts.n_imputers = completions.size();
  ts.n_cols = d;
  ts.width = ts.n_imputers + fj.block_width(d);
  ts.positions = mask.cells();
  ts.y.resize(ts.positions.size());
  ts.x.resize(ts.positions.size() * ts.width);
  std::vector<double> cand(ts.n_imputers);
  for (size_t z = 0; z < ts.positions.size(); ++z) {
    const MaskedCell& cell = ts.positions[z];
    for (size_t k = 0; k < ts.n_imputers; ++k)
      cand[k] = completions[k].at(cell.row, cell.col);
    fill_design_row(&ts.x[z * ts.width], cand, cell.col, d, fj);
    ts.y[z] = cell.truth;
  }
  return ts;
}

MetaModel fit_meta(const MetaTrainingSet& ts, double ridge_epsilon,
                   const std::vector<ImputerKind>& roster) {
  if (ts.n_rows() == 0)
    throw std::runtime_error("fit_meta: no masked cells to train on");
  if (roster.size() != ts.n_imputers)
    throw std::runtime_error("fit_meta: roster size does not match training set");
  if (ridge_epsilon < 0.0) throw ConfigError("ridge epsilon must be >= 0");
  for (double v : ts.x)
    if (!std::isfinite(v)) throw std::runtime_error("fit_meta: non-finite design entry");
  for (double v : ts.y)
    if (!std::isfinite(v)) throw std::runtime_error("fit_meta: non-finite response");

  LinearModel lin = fit_linear(ts.x, ts.n_rows(), ts.width, ts.y, ridge_epsilon);
  MetaModel model;
  model.roster = roster;
  model.n_cols = ts.n_cols;
  model.ridge_epsilon = ridge_epsilon;
  model.weights = lin.weights;
  model.intercept = lin.intercept;
  model.normal_residual = lin.normal_residual;

  double sse = 0.0;
  for (size_t z = 0; z < ts.n_rows(); ++z) {
    const double pred = predict_linear(lin, &ts.x[z * ts.width]);
    const double e = pred - ts.y[z];
    sse += e * e;
  }
  model.train_rmse = std::sqrt(sse / static_cast<double>(ts.n_rows()));
  return model;
}

double meta_predict_cell(const MetaModel& model, const std::vector<double>& candidates,
                         size_t col) {
  if (candidates.size() != model.roster.size())
    throw std::runtime_error("meta predict: candidate count does not match roster");
  std::vector<double> row(model.weights.size());
  fill_design_row(row.data(), candidates, col, model.n_cols, model.fj);
  double s = model.intercept;
  for (size_t t = 0; t < row.size(); ++t) s += model.weights[t] * row[t];
  return s;
}

std::vector<double> predict_meta(const MetaModel& model,
                                 const std::vector<DataMatrix>& completions,
                                 const std::vector<MaskedCell>& cells) {
  if (completions.size() != model.roster.size())
    throw std::runtime_error("predict_meta: completion count does not match roster");
  std::vector<double> out(cells.size());
  par_for(cells.size(), [&](size_t z) {
    std::vector<double> cand(completions.size());
    for (size_t k = 0; k < completions.size(); ++k)
      cand[k] = completions[k].at(cells[z].row, cells[z].col);
    out[z] = meta_predict_cell(model, cand, cells[z].col);
  });
  return out;
}

DataMatrix mib_complete(const MetaModel& model,
                        const std::vector<std::unique_ptr<FittedImputer>>& imputers,
                        const DataMatrix& m) {
  if (imputers.size() != model.roster.size())
    throw std::runtime_error("mib_complete: imputer count does not match roster");
  for (size_t k = 0; k < imputers.size(); ++k)
    if (imputers[k]->spec().kind != model.roster[k])
      throw std::runtime_error("mib_complete: imputer order does not match roster");
  if (m.cols != model.n_cols)
    throw DataError("mib_complete: fitted on " + std::to_string(model.n_cols) +
                    " columns, input has " + std::to_string(m.cols));

  std::vector<DataMatrix> completions;
  completions.reserve(imputers.size());
  for (const auto& imp : imputers) completions.push_back(imp->transform(m));

  std::vector<MaskedCell> cells;
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j)
      if (!m.is_observed(i, j)) cells.push_back({i, j, 0.0});

  const std::vector<double> values = predict_meta(model, completions, cells);
  DataMatrix out = m;
  for (size_t z = 0; z < cells.size(); ++z) {
    if (!std::isfinite(values[z]))
      throw std::runtime_error("mib_complete produced a non-finite value at row " +
                               std::to_string(cells[z].row) + ", column " +
                               std::to_string(cells[z].col));
    out.values[out.index(cells[z].row, cells[z].col)] = values[z];
  }
  std::fill(out.observed.begin(), out.observed.end(), uint8_t{1});
  return out;
}

std::string serialize_meta(const MetaModel& model) {
  std::ostringstream out;
  out << "meta_model v1\n";
  out << "epsilon " << format_value(model.ridge_epsilon) << "\n";
  out << "fj_mode " << fj_mode_name(model.fj.mode) << "\n";
  out << "columns " << model.n_cols << "\n";
  out << "roster";
  for (ImputerKind k : model.roster) out << ' ' << imputer_name(k);
  out << "\n";
  out << "intercept " << format_value(model.intercept) << "\n";
  out << "weights";
  for (double w : model.weights) out << ' ' << format_value(w);
  out << "\n";
  if (model.fj.mode == FjMode::OneHotStats) {
    out << "col_means";
    for (double v : model.fj.col_means) out << ' ' << format_value(v);
    out << "\ncol_stds";
    for (double v : model.fj.col_stds) out << ' ' << format_value(v);
    out << "\n";
  }
  return out.str();
}

MetaModel parse_meta(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "meta_model v1")
    throw DataError("meta model file: bad magic line");
  MetaModel model;
  auto read_doubles = [](std::istringstream& ss) {
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) vals.push_back(std::stod(tok));
    return vals;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "epsilon") {
      ss >> model.ridge_epsilon;
    } else if (key == "fj_mode") {
      std::string mode;
      ss >> mode;
      if (mode == "one-hot") model.fj.mode = FjMode::OneHot;
      else if (mode == "one-hot+stats") model.fj.mode = FjMode::OneHotStats;
      else throw DataError("meta model file: unknown fj_mode " + mode);
    } else if (key == "columns") {
      ss >> model.n_cols;
    } else if (key == "roster") {
      std::string name;
      while (ss >> name) {
        auto kind = imputer_kind_from_name(name);
        if (!kind) throw DataError("meta model file: unknown imputer " + name);
        model.roster.push_back(*kind);
      }
    } else if (key == "intercept") {
      ss >> model.intercept;
    } else if (key == "weights") {
      model.weights = read_doubles(ss);
    } else if (key == "col_means") {
      model.fj.col_means = read_doubles(ss);
    } else if (key == "col_stds") {
      model.fj.col_stds = read_doubles(ss);
    } else {
      throw DataError("meta model file: unknown key " + key);
    }
  }
  const size_t expect = model.roster.size() + model.fj.block_width(model.n_cols);
  if (model.weights.size() != expect)
    throw DataError("meta model file: weight count mismatch");
  return model;
}

}  // namespace mib
