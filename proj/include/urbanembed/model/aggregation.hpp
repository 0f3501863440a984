#pragma once

#include "urbanembed/core/autodiff.hpp"

#include <span>
#include <vector>

namespace urbanembed::aggregation {

// h = cleansed_graph * projection (N x N times N x d).
Var init_view_features(Var cleansed_graph, Var projection);
Matrix init_view_features(const Matrix& cleansed_graph, const Matrix& projection);

struct HeadOutput {
  Var scores;      // raw cosine similarity of projected features, N x N
  Var attention;   // softmax of scores over j != i; zero diagonal
  Var aggregated;  // attention * (h * projection)
};

/// One global cosine-attention head. Every region attends to every other
/// region; its own row is excluded from the softmax support. Needs N >= 2.
HeadOutput head_attention(Var h, Var projection);

struct HeadResult {
  Matrix scores;
  Matrix attention;
  Matrix aggregated;
};
HeadResult head_attention(const Matrix& h, const Matrix& projection);

/// Averages the T head outputs and applies a feature-wise softmax to each
/// row. T must divide the feature width of `h`.
Var multi_head_aggregate(Var h, std::span<const Var> head_projections);
Matrix multi_head_aggregate(const Matrix& h, std::span<const Matrix> head_projections);

/// Ablation stand-in: scaled dot-product attention restricted to graph
/// neighbours (entries where `adjacency` is true, plus self), averaged over
/// heads, followed by the same row softmax.
Var neighbor_attention_aggregate(Var h, std::span<const Var> head_projections, const BoolMatrix& adjacency);

}  // namespace urbanembed::aggregation
