#pragma once

#include "urbanembed/core/autodiff.hpp"

#include <span>
#include <vector>

namespace urbanembed::fusion {

/// Memory attention scores for one view: E * keys^T (N x H), softmax down
/// each memory column (over regions), then each row l1-normalised over the
/// H memory slots. Rows sum to 1. Evaluated in the log domain so a region
/// whose column probabilities all underflow still gets a valid row.
Var memory_attention(Var view, Var memory_keys);

/// Cross-view attentive fusion against shared key/value memories (H x d).
/// Each view gets attention(view) * values. With `sum_over_views` every
/// output is instead the sum of all views' attention * values.
std::vector<Var> attentive_fusion(std::span<const Var> views, Var memory_keys, Var memory_values,
                                  bool sum_over_views = false);
std::vector<Matrix> attentive_fusion(std::span<const Matrix> views, const Matrix& memory_keys,
                                     const Matrix& memory_values, bool sum_over_views = false);

struct SelfAttentionOutput {
  Var attention;  // N x N, rows sum to 1
  Var output;     // attention * (E * value_proj)
};

/// softmax((E Wq)(E Wk)^T) (E Wv): the quadratic baseline.
SelfAttentionOutput self_attention(Var view, Var query_proj, Var key_proj, Var value_proj);
Matrix self_attention(const Matrix& view, const Matrix& query_proj, const Matrix& key_proj, const Matrix& value_proj);

// sigmoid(gate_logit) * global + (1 - sigmoid(gate_logit)) * local.
Var gated_combine(Var local, Var global, Var gate_logit);
// Same with the gate value given directly in [0, 1].
Matrix gated_combine(const Matrix& local, const Matrix& global, double gate);

struct WeightedSum {
  Var fused;    // N x d
  Var weights;  // N x M, rows sum to 1
};

/// Per-region view weights softmax_m(E_m * weight + bias), then the weighted
/// sum of the views.
WeightedSum view_weighted_sum(std::span<const Var> views, Var weight, Var bias);

// beta * gated + (1 - beta) * fused.
Var final_embedding(Var gated, Var fused, double beta);
Matrix final_embedding(const Matrix& gated, const Matrix& fused, double beta);

}  // namespace urbanembed::fusion
