#include "csv.hpp"

#include "urbanembed/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace urbanembed::csv {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  s = s.substr(b, e - b);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Table Table::read(const std::filesystem::path& path) {
  Table t;
  t.file_name_ = path.filename().string();
  std::ifstream in(path);
  if (!in) throw DataError(t.file_name_ + ": cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header_ = fields;
      for (std::size_t i = 0; i < fields.size(); ++i) t.index_.emplace(fields[i], i);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header_.size()) {
      throw DataError(t.file_name_ + " line " + std::to_string(line_no) + ": expected " +
                      std::to_string(t.header_.size()) + " fields, found " + std::to_string(fields.size()));
    }
    t.rows_.push_back(std::move(fields));
    t.lines_.push_back(line_no);
  }
  if (!have_header) throw DataError(t.file_name_ + ": missing header row");
  return t;
}

bool Table::has_column(std::string_view name) const { return index_.count(std::string(name)) != 0; }

std::size_t Table::column(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw DataError(file_name_ + ": missing required column '" + std::string(name) + "'");
  return it->second;
}

std::string Table::where(std::size_t i) const { return file_name_ + " line " + std::to_string(lines_[i]) + ": "; }

double Table::number(std::size_t i, std::size_t col) const {
  const std::string& s = rows_[i][col];
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw DataError(where(i) + "'" + s + "' is not a finite number");
  }
  return value;
}

long long Table::integer(std::size_t i, std::size_t col) const {
  const std::string& s = rows_[i][col];
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError(where(i) + "'" + s + "' is not an integer");
  return value;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace urbanembed::csv
