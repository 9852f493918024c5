#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace srblab::experiment {

// Real as 17 significant digits; NaN as "nan", infinities as "inf"/"-inf".
std::string csv_real(double v);
// RFC-4180 quoting when the field holds a comma, quote or line break.
std::string csv_field(std::string_view s);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  // '#'-prefixed line written before the header.
  void comment(std::string line) { comments_.push_back(std::move(line)); }
  // Row length must match the header.
  void row(std::vector<std::string> cells);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

// Minimal reader for files written by CsvTable (quotes honoured, '#' lines
// skipped). Returns the header followed by data rows.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace srblab::experiment
