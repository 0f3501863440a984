#include "urbanembed/train/model.hpp"

#include "urbanembed/model/aggregation.hpp"
#include "urbanembed/model/fusion.hpp"

#include <cmath>
#include <random>

namespace urbanembed {

namespace param_names {
std::string threshold(View v) { return std::string("threshold.") + view_tag(v); }
std::string projection(View v) { return std::string("proj.") + view_tag(v); }
std::string head(View v, std::size_t t) { return std::string("head.") + view_tag(v) + "." + std::to_string(t); }
std::string gate(View v) { return std::string("gate.") + view_tag(v); }
}  // namespace param_names

namespace {

Matrix uniform_fan_in(Eigen::Index fan_in, Eigen::Index cols, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(fan_in, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  return m;
}

Matrix small_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = 0.02 * dist(rng);
  return m;
}

bool uses_thresholds(const TrainConfig& c) { return c.ablation != Ablation::NoGraphCleansing; }
bool uses_fusion(const TrainConfig& c) { return c.ablation != Ablation::NoDualStageFusion; }
bool uses_memory(const TrainConfig& c) { return uses_fusion(c) && c.ablation != Ablation::SelfAttentionFusion; }

}  // namespace

ParameterSet init_params(const TrainConfig& config, std::size_t n_regions) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const auto n = static_cast<Eigen::Index>(n_regions);
  const auto d = static_cast<Eigen::Index>(config.dim);
  const auto h = static_cast<Eigen::Index>(config.memory);

  ParameterSet params;
  if (uses_thresholds(config)) {
    for (View v : kAllViews) params.add(param_names::threshold(v), Matrix::Zero(1, 1));
  }
  for (View v : kAllViews) params.add(param_names::projection(v), uniform_fan_in(n, d, rng), true);
  for (View v : kAllViews) {
    for (std::size_t t = 0; t < config.heads; ++t) params.add(param_names::head(v, t), uniform_fan_in(d, d, rng), true);
  }
  if (uses_memory(config)) {
    params.add(param_names::kMemoryKeys, small_normal(h, d, rng));
    params.add(param_names::kMemoryValues, small_normal(h, d, rng));
  }
  if (config.ablation == Ablation::SelfAttentionFusion) {
    params.add(param_names::kQuery, uniform_fan_in(d, d, rng), true);
    params.add(param_names::kKey, uniform_fan_in(d, d, rng), true);
    params.add(param_names::kValue, uniform_fan_in(d, d, rng), true);
  }
  if (uses_fusion(config)) {
    for (View v : kAllViews) params.add(param_names::gate(v), Matrix::Zero(1, 1));
    params.add(param_names::kFusionWeight, uniform_fan_in(d, 1, rng), true);
    params.add(param_names::kFusionBias, Matrix::Zero(1, 1));
  }
  return params;
}

Matrix ForwardPass::embedding() const {
  const Matrix& first = final[0].value();
  Matrix out(first.rows(), first.cols() * 4);
  for (std::size_t v = 0; v < 4; ++v) {
    out.middleCols(static_cast<Eigen::Index>(v) * first.cols(), first.cols()) = final[v].value();
  }
  return out;
}

ForwardPass forward(Tape& tape, const ParameterSet& params, const GraphSet& graphs, std::size_t n_trips,
                    const TrainConfig& config) {
  config.validate();
  const std::size_t n = graphs.n_regions();
  std::map<std::string, Var> p;
  for (const Parameter& param : params.items()) p.emplace(param.name, tape.parameter(param.name, param.value.matrix()));
  auto get = [&](const std::string& name) {
    const auto it = p.find(name);
    if (it == p.end()) throw std::invalid_argument("forward: missing parameter '" + name + "'");
    return it->second;
  };

  ForwardPass fp;
  for (View v : kAllViews) {
    const std::size_t i = view_index(v);
    const Matrix& weights = graphs[v].weights;
    if (static_cast<std::size_t>(weights.rows()) != n) throw std::invalid_argument("forward: graph size mismatch");
    fp.cleansed[i] = uses_thresholds(config) ? cleanse(tape, weights, get(param_names::threshold(v)))
                                             : tape.constant(weights);
    fp.features[i] = aggregation::init_view_features(fp.cleansed[i], get(param_names::projection(v)));

    std::vector<Var> heads;
    for (std::size_t t = 0; t < config.heads; ++t) heads.push_back(get(param_names::head(v, t)));
    if (config.ablation == Ablation::PlainAttention) {
      const BoolMatrix adjacency = fp.cleansed[i].value().array() != 0.0;
      fp.aggregated[i] = aggregation::neighbor_attention_aggregate(fp.features[i], heads, adjacency);
    } else {
      fp.aggregated[i] = aggregation::multi_head_aggregate(fp.features[i], heads);
    }
  }

  if (uses_fusion(config)) {
    std::vector<Var> local(fp.aggregated.begin(), fp.aggregated.end());
    std::vector<Var> global;
    if (config.ablation == Ablation::SelfAttentionFusion) {
      for (Var e : local) {
        global.push_back(
            fusion::self_attention(e, get(param_names::kQuery), get(param_names::kKey), get(param_names::kValue)).output);
      }
    } else {
      global = fusion::attentive_fusion(local, get(param_names::kMemoryKeys), get(param_names::kMemoryValues),
                                        config.fusion_sum_views);
    }
    for (View v : kAllViews) {
      const std::size_t i = view_index(v);
      fp.global[i] = global[i];
      fp.gated[i] = fusion::gated_combine(local[i], global[i], get(param_names::gate(v)));
    }
    std::vector<Var> gated(fp.gated.begin(), fp.gated.end());
    auto weighted = fusion::view_weighted_sum(gated, get(param_names::kFusionWeight), get(param_names::kFusionBias));
    fp.fused = weighted.fused;
    fp.view_weights = weighted.weights;
    for (std::size_t i = 0; i < 4; ++i) fp.final[i] = fusion::final_embedding(fp.gated[i], fp.fused, config.beta);
  } else {
    fp.gated = fp.aggregated;
    fp.final = fp.aggregated;
  }

  const auto o = view_index(View::Origin), d = view_index(View::Destination);
  const auto f = view_index(View::Function), s = view_index(View::Semantics);
  fp.od = od_distributions(fp.final[o], fp.final[d]);
  fp.raw_odp = loss_odp(fp.od, graphs.trip_counts);
  fp.raw_fp = loss_reconstruction(fp.final[f], fp.cleansed[f]);
  fp.raw_sp = loss_reconstruction(fp.final[s], fp.cleansed[s]);
  if (config.normalize_losses) {
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    fp.odp = ad::scale(fp.raw_odp, 1.0 / static_cast<double>(std::max<std::size_t>(n_trips, 1)));
    fp.fp = ad::scale(fp.raw_fp, 1.0 / n2);
    fp.sp = ad::scale(fp.raw_sp, 1.0 / n2);
  } else {
    fp.odp = fp.raw_odp;
    fp.fp = fp.raw_fp;
    fp.sp = fp.raw_sp;
  }
  const Var terms[] = {fp.odp, fp.fp, fp.sp};
  fp.total = ad::add_n(terms);
  return fp;
}

double evaluate_loss(const ParameterSet& params, const GraphSet& graphs, std::size_t n_trips,
                     const TrainConfig& config) {
  Tape tape;
  return forward(tape, params, graphs, n_trips, config).total.scalar();
}

}  // namespace urbanembed
