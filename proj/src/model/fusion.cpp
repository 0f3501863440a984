#include "urbanembed/model/fusion.hpp"

#include "urbanembed/core/ops.hpp"

#include <stdexcept>

namespace urbanembed::fusion {
namespace {

void check_views(std::span<const Var> views, const char* op) {
  if (views.empty()) throw std::invalid_argument(std::string(op) + ": no views");
  for (Var v : views) {
    if (v.rows() != views[0].rows() || v.cols() != views[0].cols()) {
      throw std::invalid_argument(std::string(op) + ": view shapes differ (" + shape_string(v.value()) + " vs " +
                                  shape_string(views[0].value()) + ")");
    }
  }
}

}  // namespace

Var memory_attention(Var view, Var memory_keys) {
  if (memory_keys.cols() != view.cols()) {
    throw std::invalid_argument("memory_attention: keys " + shape_string(memory_keys.value()) + " for view " +
                                shape_string(view.value()));
  }
  // Row softmax of the column log-softmax equals the l1-normalised column
  // softmax, and stays finite when a whole row of the latter underflows.
  return ad::softmax_rows(ad::log_softmax_cols(ad::matmul_nt(view, memory_keys)));
}

std::vector<Var> attentive_fusion(std::span<const Var> views, Var memory_keys, Var memory_values,
                                  bool sum_over_views) {
  check_views(views, "attentive_fusion");
  if (memory_values.rows() != memory_keys.rows() || memory_values.cols() != views[0].cols()) {
    throw std::invalid_argument("attentive_fusion: values " + shape_string(memory_values.value()) + " for keys " +
                                shape_string(memory_keys.value()));
  }
  std::vector<Var> out;
  out.reserve(views.size());
  for (Var v : views) out.push_back(ad::matmul(memory_attention(v, memory_keys), memory_values));
  if (sum_over_views) {
    Var total = ad::add_n(out);
    out.assign(views.size(), total);
  }
  return out;
}

// The plain-matrix forms skip the tape: no copies or per-node checks, which
// is what inference and the timing benchmark want.
std::vector<Matrix> attentive_fusion(std::span<const Matrix> views, const Matrix& memory_keys,
                                     const Matrix& memory_values, bool sum_over_views) {
  if (views.empty()) throw std::invalid_argument("attentive_fusion: no views");
  for (const Matrix& v : views) {
    if (v.rows() != views[0].rows() || v.cols() != views[0].cols()) {
      throw std::invalid_argument("attentive_fusion: view shapes differ (" + shape_string(v) + " vs " +
                                  shape_string(views[0]) + ")");
    }
  }
  if (memory_keys.cols() != views[0].cols()) {
    throw std::invalid_argument("memory_attention: keys " + shape_string(memory_keys) + " for view " +
                                shape_string(views[0]));
  }
  if (memory_values.rows() != memory_keys.rows() || memory_values.cols() != views[0].cols()) {
    throw std::invalid_argument("attentive_fusion: values " + shape_string(memory_values) + " for keys " +
                                shape_string(memory_keys));
  }
  std::vector<Matrix> out;
  out.reserve(views.size());
  for (const Matrix& v : views) {
    const Matrix scores = v * memory_keys.transpose();
    out.push_back(softmax_rows(log_softmax_cols(scores)) * memory_values);
  }
  if (sum_over_views) {
    Matrix total = out[0];
    for (std::size_t m = 1; m < out.size(); ++m) total += out[m];
    out.assign(views.size(), total);
  }
  return out;
}

SelfAttentionOutput self_attention(Var view, Var query_proj, Var key_proj, Var value_proj) {
  if (view.rows() < 1) throw std::invalid_argument("self_attention: empty view");
  Var q = ad::matmul(view, query_proj);
  Var k = ad::matmul(view, key_proj);
  Var v = ad::matmul(view, value_proj);
  Var attention = ad::softmax_rows(ad::matmul_nt(q, k));
  return SelfAttentionOutput{attention, ad::matmul(attention, v)};
}

Matrix self_attention(const Matrix& view, const Matrix& query_proj, const Matrix& key_proj, const Matrix& value_proj) {
  if (view.rows() < 1) throw std::invalid_argument("self_attention: empty view");
  const Matrix q = view * query_proj;
  const Matrix k = view * key_proj;
  return softmax_rows(q * k.transpose()) * (view * value_proj);
}

Var gated_combine(Var local, Var global, Var gate_logit) {
  if (local.rows() != global.rows() || local.cols() != global.cols()) {
    throw std::invalid_argument("gated_combine: shape mismatch");
  }
  Var gate = ad::sigmoid(gate_logit);
  return ad::add(ad::scale_by(global, gate), ad::scale_by(local, ad::one_minus(gate)));
}

Matrix gated_combine(const Matrix& local, const Matrix& global, double gate) {
  if (local.rows() != global.rows() || local.cols() != global.cols()) {
    throw std::invalid_argument("gated_combine: shape mismatch");
  }
  if (!(gate >= 0.0 && gate <= 1.0)) throw std::invalid_argument("gated_combine: gate outside [0, 1]");
  return gate * global + (1.0 - gate) * local;
}

WeightedSum view_weighted_sum(std::span<const Var> views, Var weight, Var bias) {
  check_views(views, "view_weighted_sum");
  if (weight.rows() != views[0].cols() || weight.cols() != 1) {
    throw std::invalid_argument("view_weighted_sum: weight must be d x 1");
  }
  std::vector<Var> logits;
  for (Var v : views) logits.push_back(ad::add_bias(ad::matmul(v, weight), bias));
  Var weights = ad::softmax_rows(ad::concat_cols(logits));
  std::vector<Var> parts;
  for (std::size_t m = 0; m < views.size(); ++m) {
    parts.push_back(ad::mul_rows(views[m], ad::slice_cols(weights, static_cast<Eigen::Index>(m), 1)));
  }
  return WeightedSum{ad::add_n(parts), weights};
}

Var final_embedding(Var gated, Var fused, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("final_embedding: beta outside [0, 1]");
  return ad::add(ad::scale(gated, beta), ad::scale(fused, 1.0 - beta));
}

Matrix final_embedding(const Matrix& gated, const Matrix& fused, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("final_embedding: beta outside [0, 1]");
  if (gated.rows() != fused.rows() || gated.cols() != fused.cols()) {
    throw std::invalid_argument("final_embedding: shape mismatch");
  }
  return beta * gated + (1.0 - beta) * fused;
}

}  // namespace urbanembed::fusion
