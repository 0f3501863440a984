#include "urbanembed/train/checkpoint.hpp"

#include "urbanembed/error.hpp"

#include <fstream>

namespace urbanembed {

nlohmann::json to_json(const TrainConfig& c) {
  return nlohmann::json{{"epochs", c.epochs},
                        {"learning_rate", c.learning_rate},
                        {"weight_decay", c.weight_decay},
                        {"dim", c.dim},
                        {"heads", c.heads},
                        {"memory", c.memory},
                        {"beta", c.beta},
                        {"seed", c.seed},
                        {"normalize_losses", c.normalize_losses},
                        {"fusion_sum_views", c.fusion_sum_views},
                        {"ablation", to_string(c.ablation)}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.dim = j.value("dim", c.dim);
  c.heads = j.value("heads", c.heads);
  c.memory = j.value("memory", c.memory);
  c.beta = j.value("beta", c.beta);
  c.seed = j.value("seed", c.seed);
  c.normalize_losses = j.value("normalize_losses", c.normalize_losses);
  c.fusion_sum_views = j.value("fusion_sum_views", c.fusion_sum_views);
  if (j.contains("ablation")) {
    const auto parsed = parse_ablation(j.at("ablation").get<std::string>());
    if (!parsed) throw std::invalid_argument("unknown ablation '" + j.at("ablation").get<std::string>() + "'");
    c.ablation = *parsed;
  }
  return c;
}

nlohmann::json to_json(const ParameterSet& params) {
  nlohmann::json out = nlohmann::json::array();
  for (const Parameter& p : params.items()) {
    out.push_back({{"name", p.name},
                   {"shape", {p.value.rows(), p.value.cols()}},
                   {"decay", p.decay},
                   {"values", p.value.values()}});
  }
  return out;
}

ParameterSet params_from_json(const nlohmann::json& j) {
  ParameterSet params;
  for (const auto& item : j) {
    const auto shape = item.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 2) throw DataError("checkpoint: parameter shape must have two entries");
    Tensor t(shape, item.at("values").get<std::vector<double>>(), true);
    params.add(item.at("name").get<std::string>(), t.matrix(), item.value("decay", false));
  }
  return params;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const nlohmann::json j{{"format", kCheckpointFormat},
                         {"version", kCheckpointVersion},
                         {"seed", checkpoint.config.seed},
                         {"n_regions", checkpoint.n_regions},
                         {"config", to_json(checkpoint.config)},
                         {"params", to_json(checkpoint.params)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.filename().string() + ": " + e.what());
  }
  if (j.value("format", std::string()) != kCheckpointFormat) throw DataError(path.filename().string() + ": not a checkpoint");
  if (j.value("version", 0) != kCheckpointVersion) {
    throw DataError(path.filename().string() + ": unsupported checkpoint version");
  }
  Checkpoint c;
  c.config = train_config_from_json(j.at("config"));
  c.params = params_from_json(j.at("params"));
  c.n_regions = j.at("n_regions").get<std::size_t>();
  return c;
}

}  // namespace urbanembed
