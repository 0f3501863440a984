#pragma once

#include "urbanembed/core/parameters.hpp"
#include "urbanembed/data/dataset.hpp"
#include "urbanembed/graph/graphs.hpp"
#include "urbanembed/train/config.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

namespace urbanembed {

struct LossRecord {
  std::size_t epoch = 0;
  double odp = 0.0, fp = 0.0, sp = 0.0, total = 0.0;
  double raw_odp = 0.0, raw_fp = 0.0, raw_sp = 0.0;
  bool operator==(const LossRecord&) const = default;
};

struct TrainResult {
  ParameterSet params;
  std::vector<LossRecord> log;
  // Final per-view embeddings after the last update, O, D, F, S.
  std::array<Matrix, 4> views;
  // N x 4d concatenation used downstream.
  Matrix embedding;
};

using EpochCallback = std::function<void(const LossRecord&)>;

/// Full-batch training: graphs are built once, then each epoch cleanses,
/// aggregates, fuses, evaluates the loss and takes one Adam step. Thresholds
/// are clamped at 0 after each step. Throws NumericalError naming the epoch
/// if the loss stops being finite.
TrainResult train(const Dataset& data, const TrainConfig& config, const EpochCallback& on_epoch = {});
TrainResult train(const GraphSet& graphs, std::size_t n_trips, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Embeddings for given parameters without training.
std::array<Matrix, 4> embed(const ParameterSet& params, const GraphSet& graphs, std::size_t n_trips,
                            const TrainConfig& config);
Matrix concat_views(const std::array<Matrix, 4>& views);

// epoch,l_odp,l_fp,l_sp,total,raw_odp,raw_fp,raw_sp
void write_loss_log(const std::vector<LossRecord>& log, const std::filesystem::path& path);

}  // namespace urbanembed
