#include "urbanembed/train/trainer.hpp"

#include "../data/csv.hpp"
#include "urbanembed/core/adam.hpp"
#include "urbanembed/error.hpp"
#include "urbanembed/train/model.hpp"

#include <cmath>
#include <fstream>

namespace urbanembed {

TrainResult train(const Dataset& data, const TrainConfig& config, const EpochCallback& on_epoch) {
  data.validate();
  return train(build_graphs(data), data.trips.size(), config, on_epoch);
}

TrainResult train(const GraphSet& graphs, std::size_t n_trips, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  TrainResult result;
  result.params = init_params(config, graphs.n_regions());
  Adam adam(AdamOptions{config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Tape tape;
    LossRecord record;
    try {
      ForwardPass pass = forward(tape, result.params, graphs, n_trips, config);
      record = LossRecord{epoch,
                          pass.odp.scalar(),
                          pass.fp.scalar(),
                          pass.sp.scalar(),
                          0.0,
                          pass.raw_odp.scalar(),
                          pass.raw_fp.scalar(),
                          pass.raw_sp.scalar()};
      record.total = total_loss(LossComponents{record.odp, record.fp, record.sp});
      tape.backward(pass.total);
    } catch (const NumericalError& e) {
      throw NumericalError("epoch " + std::to_string(epoch) + ": " + e.what());
    }
    adam.step(result.params, tape.parameter_gradients());
    for (Parameter& p : result.params.items()) {
      if (p.name.rfind("threshold.", 0) == 0) p.value.matrix() = p.value.matrix().cwiseMax(0.0);
    }
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);
  }

  result.views = embed(result.params, graphs, n_trips, config);
  result.embedding = concat_views(result.views);
  return result;
}

std::array<Matrix, 4> embed(const ParameterSet& params, const GraphSet& graphs, std::size_t n_trips,
                            const TrainConfig& config) {
  Tape tape;
  ForwardPass pass = forward(tape, params, graphs, n_trips, config);
  std::array<Matrix, 4> out;
  for (std::size_t v = 0; v < 4; ++v) out[v] = pass.final[v].value();
  return out;
}

Matrix concat_views(const std::array<Matrix, 4>& views) {
  const Eigen::Index d = views[0].cols();
  Matrix out(views[0].rows(), 4 * d);
  for (std::size_t v = 0; v < 4; ++v) out.middleCols(static_cast<Eigen::Index>(v) * d, d) = views[v];
  return out;
}

void write_loss_log(const std::vector<LossRecord>& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,l_odp,l_fp,l_sp,total,raw_odp,raw_fp,raw_sp\n";
  for (const auto& r : log) {
    out << r.epoch << ',' << csv::format_double(r.odp) << ',' << csv::format_double(r.fp) << ','
        << csv::format_double(r.sp) << ',' << csv::format_double(r.total) << ',' << csv::format_double(r.raw_odp)
        << ',' << csv::format_double(r.raw_fp) << ',' << csv::format_double(r.raw_sp) << '\n';
  }
}

}  // namespace urbanembed
