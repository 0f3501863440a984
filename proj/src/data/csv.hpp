#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace urbanembed::csv {

// Minimal reader for the comma-separated, header-first files the pipeline
// exchanges. Fields may be wrapped in double quotes; embedded commas inside
// quotes are not supported.
class Table {
 public:
  static Table read(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  bool has_column(std::string_view name) const;
  // Throws DataError naming the file when absent.
  std::size_t column(std::string_view name) const;

  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
  // 1-based line number in the file (header is line 1).
  std::size_t line_of(std::size_t i) const { return lines_[i]; }
  const std::string& file_name() const { return file_name_; }

  // "<file> line <n>: "
  std::string where(std::size_t i) const;

  double number(std::size_t i, std::size_t col) const;
  long long integer(std::size_t i, std::size_t col) const;

 private:
  std::string file_name_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace urbanembed::csv
