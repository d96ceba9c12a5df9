#include "mib/mask.hpp"

#include <charconv>
#include <sstream>

#include "mib/csv.hpp"
#include "mib/errors.hpp"
#include "mib/rng.hpp"

namespace mib {

std::vector<MaskedCell> Mask::cells() const {
  std::vector<MaskedCell> out;
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      if (hidden[i * cols + j]) out.push_back({i, j, truth[i * cols + j]});
  return out;
}

size_t Mask::count() const {
  size_t n = 0;
  for (uint8_t h : hidden) n += h;
  return n;
}

Mask apply_mcar_mask(DataMatrix& m, double rate, uint64_t seed, size_t excluded_col) {
  if (rate < 0.0 || rate > 1.0)
    throw ConfigError("mask rate must be in [0, 1], got " + std::to_string(rate));
  Mask mask;
  mask.rows = m.rows;
  mask.cols = m.cols;
  mask.hidden.assign(m.rows * m.cols, 0);
  mask.truth.assign(m.rows * m.cols, 0.0);
  mask.seed = seed;
  mask.rate = rate;
  SplitMix64 rng(seed);
  for (size_t i = 0; i < m.rows; ++i) {
    for (size_t j = 0; j < m.cols; ++j) {
      if (j == excluded_col || !m.is_observed(i, j)) continue;
      if (rng.next_double() < rate) {
        mask.hidden[i * m.cols + j] = 1;
        mask.truth[i * m.cols + j] = m.at(i, j);
        m.set_missing(i, j);
      }
    }
  }
  return mask;
}

std::string render_mask(const Mask& mask) {
  std::ostringstream out;
  out << "# seed=" << mask.seed << " rate=" << format_value(mask.rate) << "\n";
  out << "row,col,truth\n";
  for (const auto& c : mask.cells())
    out << c.row << ',' << c.col << ',' << format_value(c.truth) << "\n";
  return out.str();
}

Mask parse_mask(const std::string& text, size_t rows, size_t cols) {
  Mask mask;
  mask.rows = rows;
  mask.cols = cols;
  mask.hidden.assign(rows * cols, 0);
  mask.truth.assign(rows * cols, 0.0);
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "seed") mask.seed = std::stoull(val);
        if (key == "rate") mask.rate = std::stod(val);
      }
      continue;
    }
    if (!have_header) {
      if (line != "row,col,truth")
        throw DataError("mask file: expected 'row,col,truth' header, got '" + line + "'");
      have_header = true;
      continue;
    }
    size_t r = 0, c = 0;
    double t = 0.0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto res = std::from_chars(p, end, r);
    if (res.ec != std::errc() || res.ptr == end || *res.ptr != ',')
      throw DataError("mask file: bad row field at line " + std::to_string(lineno));
    p = res.ptr + 1;
    res = std::from_chars(p, end, c);
    if (res.ec != std::errc() || res.ptr == end || *res.ptr != ',')
      throw DataError("mask file: bad col field at line " + std::to_string(lineno));
    p = res.ptr + 1;
    auto dres = std::from_chars(p, end, t);
    if (dres.ec != std::errc() || dres.ptr != end)
      throw DataError("mask file: bad truth field at line " + std::to_string(lineno));
    if (r >= rows || c >= cols)
      throw DataError("mask file: cell (" + std::to_string(r) + "," + std::to_string(c) +
                      ") outside matrix " + std::to_string(rows) + "x" +
                      std::to_string(cols));
    mask.hidden[r * cols + c] = 1;
    mask.truth[r * cols + c] = t;
  }
  if (!have_header) throw DataError("mask file: missing 'row,col,truth' header");
  return mask;
}

void write_mask(const Mask& mask, const std::string& path) {
  write_text_file(path, render_mask(mask));
}

Mask load_mask(const std::string& path, size_t rows, size_t cols) {
  return parse_mask(read_text_file(path), rows, cols);
}

}  // namespace mib
