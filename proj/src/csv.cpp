#include "mib/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mib/errors.hpp"

namespace mib {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

DataMatrix parse_csv(std::istream& in, const std::optional<std::string>& target_name,
                     const std::string& source_label) {
  std::string line;
  bool have_header = false;
  std::vector<std::string> names;
  // Rows are collected first; the matrix is sized once the extent is known.
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!have_header) {
      if (!line.empty() && line[0] == '#') continue;  // metadata comment
      if (trimmed(line).empty()) continue;
      names = split_fields(line);
      for (auto& n : names) n = trimmed(n);
      if (names.size() < 2)
        throw DataError(source_label + ": header must name at least 2 columns");
      have_header = true;
      continue;
    }
    if (trimmed(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != names.size()) {
      throw DataError(source_label + ": data row " + std::to_string(rows.size() + 1) +
                      " has " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(names.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError(source_label + ": no header line found");
  if (rows.empty()) throw DataError(source_label + ": no data rows");

  DataMatrix m = make_matrix(rows.size(), names.size());
  m.column_names = names;
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < names.size(); ++j) {
      const std::string f = trimmed(rows[i][j]);
      if (f.empty()) {
        m.set_missing(i, j);
        continue;
      }
      double v = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw DataError(source_label + ": field '" + f + "' at data row " +
                        std::to_string(i + 1) + ", column " + names[j] +
                        " is not numeric");
      }
      m.set(i, j, v);
    }
  }
  if (target_name) {
    bool found = false;
    for (size_t j = 0; j < names.size(); ++j) {
      if (names[j] == *target_name) {
        m.target_col = j;
        found = true;
        break;
      }
    }
    if (!found)
      throw DataError(source_label + ": target column '" + *target_name +
                      "' not present in header");
  }
  return m;
}

DataMatrix load_csv(const std::string& path,
                    const std::optional<std::string>& target_name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return parse_csv(in, target_name, path);
}

std::string format_value(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string render_csv(const DataMatrix& m,
                       const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& c : header_comments) out << "# " << c << "\n";
  for (size_t j = 0; j < m.cols; ++j) {
    if (j) out << ',';
    out << m.column_names[j];
  }
  out << '\n';
  for (size_t i = 0; i < m.rows; ++i) {
    for (size_t j = 0; j < m.cols; ++j) {
      if (j) out << ',';
      if (m.is_observed(i, j)) out << format_value(m.at(i, j));
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const DataMatrix& m, const std::string& path,
               const std::vector<std::string>& header_comments) {
  write_text_file(path, render_csv(m, header_comments));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mib
