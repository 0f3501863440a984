#include "urbanembed/cli/run_config.hpp"

#include "urbanembed/train/checkpoint.hpp"

#include <stdexcept>

namespace urbanembed::cli {

void RunConfig::validate() const {
  if (data_dir && generator) throw std::invalid_argument("give either a dataset directory or generator settings, not both");
  if (!data_dir && !generator) throw std::invalid_argument("no data source: pass --data DIR or generator settings");
  if (generator) generator->validate();
  train.validate();
}

nlohmann::json to_json(const CityConfig& c) {
  return nlohmann::json{{"n_regions", c.n_regions},
                        {"n_districts", c.n_districts},
                        {"n_poi_categories", c.n_poi_categories},
                        {"n_checkin_categories", c.n_checkin_categories},
                        {"n_trips", c.n_trips},
                        {"noise_level", c.noise_level},
                        {"seed", c.seed},
                        {"deterministic_trips", c.deterministic_trips}};
}

CityConfig city_config_from_json(const nlohmann::json& j, CityConfig c) {
  if (!j.is_object()) throw std::invalid_argument("generator settings must be a JSON object");
  c.n_regions = j.value("n_regions", c.n_regions);
  c.n_districts = j.value("n_districts", c.n_districts);
  c.n_poi_categories = j.value("n_poi_categories", c.n_poi_categories);
  c.n_checkin_categories = j.value("n_checkin_categories", c.n_checkin_categories);
  c.n_trips = j.value("n_trips", c.n_trips);
  c.noise_level = j.value("noise_level", c.noise_level);
  c.seed = j.value("seed", c.seed);
  c.deterministic_trips = j.value("deterministic_trips", c.deterministic_trips);
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = to_json(c.train);
  j["data"] = c.data_dir ? nlohmann::json(c.data_dir->string()) : nlohmann::json(nullptr);
  j["generator"] = c.generator ? to_json(*c.generator) : nlohmann::json(nullptr);
  j["out"] = c.out.string();
  j["dump_graphs"] = c.dump_graphs;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  try {
    c.train = train_config_from_json(j, c.train);
    if (j.contains("data") && !j.at("data").is_null()) c.data_dir = j.at("data").get<std::string>();
    if (j.contains("generator") && !j.at("generator").is_null()) {
      c.generator = city_config_from_json(j.at("generator"), c.generator.value_or(CityConfig{}));
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    c.dump_graphs = j.value("dump_graphs", c.dump_graphs);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace urbanembed::cli
