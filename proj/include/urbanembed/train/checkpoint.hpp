#pragma once

#include "urbanembed/core/parameters.hpp"
#include "urbanembed/train/config.hpp"

#include <json.hpp>

#include <filesystem>

namespace urbanembed {

inline constexpr const char* kCheckpointFormat = "urbanembed-checkpoint";
inline constexpr int kCheckpointVersion = 1;

nlohmann::json to_json(const TrainConfig& config);
// Missing keys keep the values already in `base`.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

nlohmann::json to_json(const ParameterSet& params);
ParameterSet params_from_json(const nlohmann::json& j);

struct Checkpoint {
  TrainConfig config;
  ParameterSet params;
  std::size_t n_regions = 0;
};

// {"format", "version", "seed", "n_regions", "config", "params": {name: {shape, decay, values}}}
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace urbanembed
