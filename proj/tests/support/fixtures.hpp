#pragma once

#include "urbanembed/core/tensor.hpp"

#include <json.hpp>

#include <unistd.h>

#include <filesystem>
#include <limits>
#include <fstream>
#include <string>
#include <vector>

namespace urbanembed::testing {

inline std::filesystem::path fixture_dir() { return URBANEMBED_FIXTURE_DIR; }

inline const nlohmann::json& oracles() {
  static const nlohmann::json j = [] {
    std::ifstream in(fixture_dir() / "oracles.json");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline const nlohmann::json& calibration() {
  static const nlohmann::json j = [] {
    std::ifstream in(fixture_dir() / "calibration.json");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline Matrix to_matrix(const nlohmann::json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Matrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  }
  return out;
}

inline Vector to_vector(const nlohmann::json& values) {
  Vector out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i].get<double>();
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  return (a - b).cwiseAbs().maxCoeff();
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      path_ = base / ("urbanembed_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++) + "_" +
                      std::to_string(i));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace urbanembed::testing
