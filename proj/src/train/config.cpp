#include "urbanembed/train/config.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace urbanembed {

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::None: return "full";
    case Ablation::NoGraphCleansing: return "w/o-GCL";
    case Ablation::PlainAttention: return "w/o-MGAM";
    case Ablation::SelfAttentionFusion: return "w/o-AFM";
    case Ablation::NoDualStageFusion: return "w/o-DSGF";
  }
  return "unknown";
}

std::optional<Ablation> parse_ablation(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (const std::string prefix : {"wo", "no", "without"}) {
    if (key.size() > prefix.size() && key.compare(0, prefix.size(), prefix) == 0 && key != "none") {
      key.erase(0, prefix.size());
      break;
    }
  }
  if (key.empty() || key == "full" || key == "none") return Ablation::None;
  if (key == "gcl") return Ablation::NoGraphCleansing;
  if (key == "mgam") return Ablation::PlainAttention;
  if (key == "afm") return Ablation::SelfAttentionFusion;
  if (key == "dsgf") return Ablation::NoDualStageFusion;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be non-negative");
  if (dim == 0 || heads == 0 || memory == 0) throw std::invalid_argument("dim, heads and memory must be positive");
  if (dim % heads != 0) {
    throw std::invalid_argument("heads (" + std::to_string(heads) + ") must divide dim (" + std::to_string(dim) + ")");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
}

}  // namespace urbanembed
