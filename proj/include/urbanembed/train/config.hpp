#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace urbanembed {

/// Architecture variants. Each one removes a single component of the full
/// model so its contribution can be measured.
enum class Ablation {
  None,
  NoGraphCleansing,     // w/o-GCL: graphs used as built, no thresholds
  PlainAttention,       // w/o-MGAM: neighbour dot-product attention on graph edges
  SelfAttentionFusion,  // w/o-AFM: quadratic self-attention instead of memory attention
  NoDualStageFusion,    // w/o-DSGF: aggregated views used directly
};

// "full", "w/o-GCL", "w/o-MGAM", "w/o-AFM", "w/o-DSGF"
std::string to_string(Ablation a);
// Case-insensitive; also accepts "none", "no-gcl", "gcl", ...
std::optional<Ablation> parse_ablation(const std::string& name);

struct TrainConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.005;
  double weight_decay = 0.001;
  std::size_t dim = 144;
  std::size_t heads = 12;
  std::size_t memory = 32;
  double beta = 0.5;
  std::uint64_t seed = 0;
  // Divide the OD loss by the trip count and the reconstruction losses by N^2.
  bool normalize_losses = false;
  // Every view receives the sum over views of memory-attention outputs.
  bool fusion_sum_views = false;
  Ablation ablation = Ablation::None;

  void validate() const;
};

}  // namespace urbanembed
