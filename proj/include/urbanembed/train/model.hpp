#pragma once

#include "urbanembed/core/autodiff.hpp"
#include "urbanembed/core/parameters.hpp"
#include "urbanembed/graph/graphs.hpp"
#include "urbanembed/train/config.hpp"
#include "urbanembed/train/losses.hpp"

#include <array>
#include <string>

namespace urbanembed {

// Parameter names used in the registry and in checkpoints.
namespace param_names {
std::string threshold(View v);                // threshold.O
std::string projection(View v);               // proj.O
std::string head(View v, std::size_t t);      // head.O.0
inline const std::string kMemoryKeys = "memory.key";
inline const std::string kMemoryValues = "memory.value";
std::string gate(View v);                     // gate.O
inline const std::string kFusionWeight = "fusion.weight";
inline const std::string kFusionBias = "fusion.bias";
inline const std::string kQuery = "selfattn.query";
inline const std::string kKey = "selfattn.key";
inline const std::string kValue = "selfattn.value";
}  // namespace param_names

/// Creates every trainable tensor the configured variant uses:
/// projections uniform(+-1/sqrt(fan_in)), memories N(0, 1) * 0.02,
/// thresholds and gate logits 0, fusion bias 0.
ParameterSet init_params(const TrainConfig& config, std::size_t n_regions);

struct ForwardPass {
  std::array<Var, 4> cleansed;    // G'
  std::array<Var, 4> features;    // h
  std::array<Var, 4> aggregated;  // E
  std::array<Var, 4> global;      // E-hat (unset for w/o-DSGF)
  std::array<Var, 4> gated;       // E'
  Var fused;                      // E_F
  Var view_weights;               // N x 4
  std::array<Var, 4> final;       // E-tilde
  OdDistributions od;

  Var raw_odp, raw_fp, raw_sp;
  Var odp, fp, sp;  // normalised when configured
  Var total;

  // N x 4d, views in O, D, F, S order.
  Matrix embedding() const;
};

/// Records the full model on `tape`, registering every parameter in
/// `params` under its name.
ForwardPass forward(Tape& tape, const ParameterSet& params, const GraphSet& graphs, std::size_t n_trips,
                    const TrainConfig& config);

// Total loss as a plain function of the parameters (for gradient checks).
double evaluate_loss(const ParameterSet& params, const GraphSet& graphs, std::size_t n_trips,
                     const TrainConfig& config);

}  // namespace urbanembed
