#pragma once

#include "urbanembed/core/tensor.hpp"
#include "urbanembed/data/dataset.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace urbanembed {

/// Region embeddings keyed by external region id; columns are named
/// O_0..O_{d-1}, D_0.., F_0.., S_0.. for the four views.
struct EmbeddingTable {
  std::vector<std::string> region_ids;
  std::vector<std::string> columns;
  Matrix values;
};

EmbeddingTable make_embedding_table(const RegionSet& regions, const std::array<Matrix, 4>& views);

// region_id,<columns...>
void write_embeddings_csv(const EmbeddingTable& table, const std::filesystem::path& path);
// Throws DataError on malformed files.
EmbeddingTable read_embeddings_csv(const std::filesystem::path& path);

// {"region_ids", "columns", "values": [[...], ...]} plus any `extra` keys.
nlohmann::json embeddings_to_json(const EmbeddingTable& table, const nlohmann::json& extra = nlohmann::json::object());

// Reorders rows to follow `regions`; throws DataError if the id sets differ.
Matrix align_rows(const EmbeddingTable& table, const RegionSet& regions);

}  // namespace urbanembed
