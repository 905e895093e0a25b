#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dfcal {

/// Headed CSV without quoting. Blank lines are skipped; `lines` keeps the
/// 1-based source line of every row for diagnostics.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  /// Index of a named column; InvalidInput when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;

  double number(std::size_t row, std::size_t col) const;
  /// "0" or "1"; anything else is InvalidInput naming the line.
  int label(std::size_t row, std::size_t col) const;

  std::vector<double> numbers(const std::string& name) const;
  std::vector<int> labels(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source = "input");
CsvTable read_csv(const std::string& path);

std::string read_file(const std::string& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace dfcal
