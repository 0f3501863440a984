#include "urbanembed/model/aggregation.hpp"

#include <cmath>
#include <stdexcept>

namespace urbanembed::aggregation {
namespace {

void check_heads(Var h, std::span<const Var> heads) {
  if (heads.empty()) throw std::invalid_argument("multi_head_aggregate: no heads");
  if (h.cols() % static_cast<Eigen::Index>(heads.size()) != 0) {
    throw std::invalid_argument("multi_head_aggregate: " + std::to_string(heads.size()) +
                                " heads do not divide feature width " + std::to_string(h.cols()));
  }
  for (Var w : heads) {
    if (w.rows() != h.cols() || w.cols() != h.cols()) {
      throw std::invalid_argument("multi_head_aggregate: head projection " + shape_string(w.value()) +
                                  " for width " + std::to_string(h.cols()));
    }
  }
}

BoolMatrix off_diagonal(Eigen::Index n) {
  BoolMatrix mask = BoolMatrix::Constant(n, n, true);
  mask.diagonal().setConstant(false);
  return mask;
}

}  // namespace

Var init_view_features(Var cleansed_graph, Var projection) {
  if (cleansed_graph.rows() != cleansed_graph.cols()) {
    throw std::invalid_argument("init_view_features: graph must be square, got " + shape_string(cleansed_graph.value()));
  }
  if (projection.rows() != cleansed_graph.cols()) {
    throw std::invalid_argument("init_view_features: projection " + shape_string(projection.value()) +
                                " for graph " + shape_string(cleansed_graph.value()));
  }
  return ad::matmul(cleansed_graph, projection);
}

Matrix init_view_features(const Matrix& cleansed_graph, const Matrix& projection) {
  Tape tape;
  return init_view_features(tape.constant(cleansed_graph), tape.constant(projection)).value();
}

HeadOutput head_attention(Var h, Var projection) {
  const Eigen::Index n = h.rows();
  if (n < 2) throw std::invalid_argument("head_attention: need at least 2 regions");
  if (!h.value().allFinite()) throw std::invalid_argument("head_attention: non-finite features");
  Var z = ad::matmul(h, projection);
  Var unit = ad::l2_normalize_rows(z);
  Var scores = ad::matmul_nt(unit, unit);
  Var attention = ad::softmax_rows(scores, off_diagonal(n));
  return HeadOutput{scores, attention, ad::matmul(attention, z)};
}

HeadResult head_attention(const Matrix& h, const Matrix& projection) {
  Tape tape;
  auto out = head_attention(tape.constant(h), tape.constant(projection));
  return HeadResult{out.scores.value(), out.attention.value(), out.aggregated.value()};
}

Var multi_head_aggregate(Var h, std::span<const Var> head_projections) {
  check_heads(h, head_projections);
  std::vector<Var> outputs;
  outputs.reserve(head_projections.size());
  for (Var w : head_projections) outputs.push_back(head_attention(h, w).aggregated);
  return ad::softmax_rows(ad::mean_n(outputs));
}

Matrix multi_head_aggregate(const Matrix& h, std::span<const Matrix> head_projections) {
  Tape tape;
  std::vector<Var> heads;
  for (const Matrix& w : head_projections) heads.push_back(tape.constant(w));
  return multi_head_aggregate(tape.constant(h), heads).value();
}

Var neighbor_attention_aggregate(Var h, std::span<const Var> head_projections, const BoolMatrix& adjacency) {
  check_heads(h, head_projections);
  const Eigen::Index n = h.rows();
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw std::invalid_argument("neighbor_attention_aggregate: adjacency shape mismatch");
  }
  BoolMatrix mask = adjacency;
  mask.diagonal().setConstant(true);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(h.cols()));
  std::vector<Var> outputs;
  for (Var w : head_projections) {
    Var z = ad::matmul(h, w);
    Var attention = ad::softmax_rows(ad::scale(ad::matmul_nt(z, z), inv_sqrt), mask);
    outputs.push_back(ad::matmul(attention, z));
  }
  return ad::softmax_rows(ad::mean_n(outputs));
}

}  // namespace urbanembed::aggregation
