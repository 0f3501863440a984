#include "urbanembed/train/export.hpp"

#include "data/csv.hpp"
#include "urbanembed/error.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

namespace urbanembed {

EmbeddingTable make_embedding_table(const RegionSet& regions, const std::array<Matrix, 4>& views) {
  const Eigen::Index n = views[0].rows();
  const Eigen::Index d = views[0].cols();
  if (static_cast<std::size_t>(n) != regions.count) {
    throw std::invalid_argument("make_embedding_table: " + std::to_string(n) + " rows for " +
                                std::to_string(regions.count) + " regions");
  }
  EmbeddingTable t;
  t.region_ids = regions.ids;
  t.values.resize(n, 4 * d);
  const char* tags[] = {"O", "D", "F", "S"};
  for (Eigen::Index v = 0; v < 4; ++v) {
    if (views[static_cast<std::size_t>(v)].rows() != n || views[static_cast<std::size_t>(v)].cols() != d) {
      throw std::invalid_argument("make_embedding_table: views differ in shape");
    }
    t.values.middleCols(v * d, d) = views[static_cast<std::size_t>(v)];
    for (Eigen::Index k = 0; k < d; ++k) t.columns.push_back(std::string(tags[v]) + "_" + std::to_string(k));
  }
  return t;
}

void write_embeddings_csv(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "region_id";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    out << table.region_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < table.values.cols(); ++k) out << ',' << csv::format_double(table.values(i, k));
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

EmbeddingTable read_embeddings_csv(const std::filesystem::path& path) {
  const csv::Table csv = csv::Table::read(path);
  const std::size_t id_col = csv.column("region_id");
  if (id_col != 0) throw DataError(path.filename().string() + ": region_id must be the first column");
  EmbeddingTable t;
  t.columns = csv.header();
  t.columns.erase(t.columns.begin());
  if (t.columns.empty()) throw DataError(path.filename().string() + ": no embedding columns");
  t.values.resize(static_cast<Eigen::Index>(csv.row_count()), static_cast<Eigen::Index>(t.columns.size()));
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < csv.row_count(); ++i) {
    const std::string& id = csv.row(i)[0];
    if (!seen.emplace(id, i).second) throw DataError(csv.where(i) + "duplicate region id '" + id + "'");
    t.region_ids.push_back(id);
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      const double v = csv.number(i, k + 1);
      if (!std::isfinite(v)) throw DataError(csv.where(i) + "non-finite embedding value");
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return t;
}

nlohmann::json embeddings_to_json(const EmbeddingTable& table, const nlohmann::json& extra) {
  nlohmann::json j = extra;
  j["region_ids"] = table.region_ids;
  j["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    std::vector<double> row(table.values.row(i).begin(), table.values.row(i).end());
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j;
}

Matrix align_rows(const EmbeddingTable& table, const RegionSet& regions) {
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < table.region_ids.size(); ++i) row_of.emplace(table.region_ids[i], static_cast<Eigen::Index>(i));
  if (table.region_ids.size() != regions.count) {
    throw DataError("embeddings cover " + std::to_string(table.region_ids.size()) + " regions, targets cover " +
                    std::to_string(regions.count));
  }
  Matrix out(table.values.rows(), table.values.cols());
  for (std::size_t i = 0; i < regions.count; ++i) {
    const auto it = row_of.find(regions.ids[i]);
    if (it == row_of.end()) throw DataError("region id '" + regions.ids[i] + "' has no embedding row");
    out.row(static_cast<Eigen::Index>(i)) = table.values.row(it->second);
  }
  return out;
}

}  // namespace urbanembed
