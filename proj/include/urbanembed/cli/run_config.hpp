#pragma once

#include "urbanembed/data/generator.hpp"
#include "urbanembed/train/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>

namespace urbanembed::cli {

/// Everything one command needs: training settings, one data source (a
/// dataset directory or generator settings) and an output directory.
struct RunConfig {
  TrainConfig train;
  std::optional<std::filesystem::path> data_dir;
  std::optional<CityConfig> generator;
  std::filesystem::path out;
  bool dump_graphs = false;

  // Throws std::invalid_argument unless exactly one data source is set and
  // the training settings are valid.
  void validate() const;
};

nlohmann::json to_json(const CityConfig& config);
CityConfig city_config_from_json(const nlohmann::json& j, CityConfig base = {});

nlohmann::json to_json(const RunConfig& config);
// Keys: the training keys at top level, plus "data", "generator", "out",
// "dump_graphs". Missing keys keep the values in `base`.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

}  // namespace urbanembed::cli
