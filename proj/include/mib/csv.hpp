#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mib/data_matrix.hpp"

namespace mib {

/// Comma-separated, first row header, empty field = missing, no quoting.
/// Leading lines starting with '#' are metadata comments and are skipped.
DataMatrix load_csv(const std::string& path,
                    const std::optional<std::string>& target_name = {});

DataMatrix parse_csv(std::istream& in, const std::optional<std::string>& target_name,
                     const std::string& source_label);

/// Finite values are printed with 17 significant digits so a write/load
/// round trip is bit-exact. Missing cells render as empty fields.
std::string format_value(double v);

std::string render_csv(const DataMatrix& m,
                       const std::vector<std::string>& header_comments = {});

void write_csv(const DataMatrix& m, const std::string& path,
               const std::vector<std::string>& header_comments = {});

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mib
