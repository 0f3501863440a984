#include "fixtures.hpp"

#include "urbanembed/core/finite_diff.hpp"
#include "urbanembed/core/parameters.hpp"
#include "urbanembed/model/fusion.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace urbanembed;
using namespace urbanembed::fusion;
using urbanembed::testing::max_abs_diff;
using urbanembed::testing::oracles;
using urbanembed::testing::to_matrix;

namespace {

Matrix gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = d(rng);
  return m;
}

}  // namespace

TEST(Fusion, AttentiveFusionMatchesOracle) {
  const auto& o = oracles()["attentive_fusion"];
  std::vector<Matrix> views;
  for (const auto& v : o["views"]) views.push_back(to_matrix(v));
  const Matrix keys = to_matrix(o["keys"]), values = to_matrix(o["values"]);

  Tape tape;
  for (std::size_t m = 0; m < views.size(); ++m) {
    const Matrix a = memory_attention(tape.constant(views[m]), tape.constant(keys)).value();
    EXPECT_LT(max_abs_diff(a, to_matrix(o["expected_attention"][m])), 1e-12);
  }
  const auto out = attentive_fusion(views, keys, values);
  for (std::size_t m = 0; m < views.size(); ++m) EXPECT_LT(max_abs_diff(out[m], to_matrix(o["expected"][m])), 1e-12);
  const auto summed = attentive_fusion(views, keys, values, true);
  for (const Matrix& s : summed) EXPECT_LT(max_abs_diff(s, to_matrix(o["expected_sum"])), 1e-12);
}

TEST(Fusion, SelfAttentionMatchesOracle) {
  const auto& o = oracles()["self_attention"];
  EXPECT_LT(max_abs_diff(self_attention(to_matrix(o["view"]), to_matrix(o["query"]), to_matrix(o["key"]),
                                        to_matrix(o["value"])),
                         to_matrix(o["expected"])),
            1e-12);
}

TEST(Fusion, ViewWeightedSumMatchesOracle) {
  const auto& o = oracles()["view_weighted_sum"];
  Tape tape;
  std::vector<Var> views;
  for (const auto& v : o["views"]) views.push_back(tape.constant(to_matrix(v)));
  const auto r = view_weighted_sum(views, tape.constant(to_matrix(o["weight"])),
                                   tape.constant(Matrix::Constant(1, 1, o["bias"].get<double>())));
  EXPECT_LT(max_abs_diff(r.weights.value(), to_matrix(o["expected_weights"])), 1e-12);
  EXPECT_LT(max_abs_diff(r.fused.value(), to_matrix(o["expected"])), 1e-12);
}

TEST(Fusion, MemoryAttentionRowsSumToOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    Tape tape;
    const Matrix a = memory_attention(tape.constant(gaussian(9, 6, rng)), tape.constant(gaussian(5, 6, rng))).value();
    EXPECT_LT((a.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_GT(a.minCoeff(), 0.0);
  }
}

TEST(Fusion, GateBlendsWithinBounds) {
  std::mt19937_64 rng(3);
  const Matrix local = gaussian(3, 2, rng), global = gaussian(3, 2, rng);
  Tape tape;
  for (double logit : {-50.0, -1.0, 0.0, 2.0, 50.0}) {
    const Matrix g = gated_combine(tape.constant(local), tape.constant(global),
                                   tape.constant(Matrix::Constant(1, 1, logit)))
                         .value();
    const double s = 1.0 / (1.0 + std::exp(-logit));
    EXPECT_LT(max_abs_diff(g, gated_combine(local, global, s)), 1e-12);
    const Matrix lo = local.cwiseMin(global), hi = local.cwiseMax(global);
    EXPECT_TRUE(((g.array() >= lo.array() - 1e-12) && (g.array() <= hi.array() + 1e-12)).all());
  }
  EXPECT_THROW(gated_combine(local, global, 1.5), std::invalid_argument);
}

TEST(Fusion, ViewWeightsSumToOne) {
  std::mt19937_64 rng(5);
  Tape tape;
  std::vector<Var> views;
  for (int m = 0; m < 4; ++m) views.push_back(tape.constant(gaussian(6, 3, rng)));
  const auto r = view_weighted_sum(views, tape.constant(gaussian(3, 1, rng)), tape.constant(Matrix::Zero(1, 1)));
  EXPECT_LT((r.weights.value().rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_THROW(view_weighted_sum(views, tape.constant(gaussian(2, 1, rng)), tape.constant(Matrix::Zero(1, 1))),
               std::invalid_argument);
}

TEST(Fusion, FinalEmbeddingBeta) {
  const Matrix a = Matrix::Constant(2, 2, 1.0), b = Matrix::Constant(2, 2, 3.0);
  EXPECT_EQ(final_embedding(a, b, 1.0), a);
  EXPECT_EQ(final_embedding(a, b, 0.0), b);
  EXPECT_EQ(final_embedding(a, b, 0.5), Matrix::Constant(2, 2, 2.0));
  EXPECT_THROW(final_embedding(a, b, -0.1), std::invalid_argument);
  EXPECT_THROW(final_embedding(a, Matrix::Zero(3, 2), 0.5), std::invalid_argument);
}

TEST(Fusion, ShapeErrors) {
  std::mt19937_64 rng(6);
  const std::vector<Matrix> views{gaussian(4, 3, rng), gaussian(5, 3, rng)};
  EXPECT_THROW(attentive_fusion(views, gaussian(2, 3, rng), gaussian(2, 3, rng)), std::invalid_argument);
  const std::vector<Matrix> ok{gaussian(4, 3, rng)};
  EXPECT_THROW(attentive_fusion(ok, gaussian(2, 2, rng), gaussian(2, 3, rng)), std::invalid_argument);
  EXPECT_THROW(attentive_fusion(ok, gaussian(2, 3, rng), gaussian(3, 3, rng)), std::invalid_argument);
}

TEST(Fusion, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  ParameterSet p;
  p.add("view0", gaussian(4, 3, rng));
  p.add("view1", gaussian(4, 3, rng));
  p.add("keys", gaussian(2, 3, rng));
  p.add("values", gaussian(2, 3, rng));
  p.add("gate", Matrix::Constant(1, 1, 0.3));
  p.add("weight", gaussian(3, 1, rng));
  p.add("bias", Matrix::Constant(1, 1, 0.1));
  const Matrix probe = gaussian(4, 3, rng);

  auto build = [&](Tape& t, const ParameterSet& q) {
    std::map<std::string, Var> v;
    for (const Parameter& x : q.items()) v.emplace(x.name, t.parameter(x.name, x.value.matrix()));
    const std::vector<Var> views{v.at("view0"), v.at("view1")};
    const auto global = attentive_fusion(views, v.at("keys"), v.at("values"));
    std::vector<Var> gated;
    for (std::size_t m = 0; m < 2; ++m) gated.push_back(gated_combine(views[m], global[m], v.at("gate")));
    const auto w = view_weighted_sum(gated, v.at("weight"), v.at("bias"));
    Var out = final_embedding(gated[0], w.fused, 0.4);
    return ad::sum(ad::hadamard(out, t.constant(probe)));
  };
  Tape tape;
  Var loss = build(tape, p);
  tape.backward(loss);
  const GradientMap analytic = tape.parameter_gradients();
  const GradientMap numeric = finite_diff_grad(
      [&](const ParameterSet& q) {
        Tape t;
        return build(t, q).scalar();
      },
      p, 1e-5);
  const auto cmp = compare_gradients(analytic, numeric);
  EXPECT_TRUE(cmp.ok) << cmp.worst_parameter << " " << cmp.max_relative_error;
}

TEST(Fusion, MatrixAndTapePathsAgree) {
  std::mt19937_64 rng(11);
  const std::vector<Matrix> views{gaussian(6, 4, rng), gaussian(6, 4, rng), gaussian(6, 4, rng)};
  const Matrix keys = gaussian(3, 4, rng), values = gaussian(3, 4, rng);
  const Matrix wq = gaussian(4, 4, rng), wk = gaussian(4, 4, rng), wv = gaussian(4, 4, rng);
  Tape tape;
  std::vector<Var> vs;
  for (const Matrix& v : views) vs.push_back(tape.constant(v));
  for (bool sum : {false, true}) {
    const auto plain = attentive_fusion(views, keys, values, sum);
    const auto taped = attentive_fusion(vs, tape.constant(keys), tape.constant(values), sum);
    for (std::size_t m = 0; m < views.size(); ++m) EXPECT_LT(max_abs_diff(plain[m], taped[m].value()), 1e-12);
  }
  EXPECT_LT(max_abs_diff(self_attention(views[0], wq, wk, wv),
                         self_attention(vs[0], tape.constant(wq), tape.constant(wk), tape.constant(wv)).output.value()),
            1e-12);
}

// One region scoring far below the rest in every memory column has column
// probabilities that all underflow; its attention row must still be valid.
TEST(Fusion, MemoryAttentionSurvivesUnderflow) {
  Matrix view(3, 2);
  view << 1.0, 0.0, 1.0, 0.5, -1.0, 0.0;
  Matrix keys(2, 2);
  keys << 2000.0, 0.0, 1000.0, 1.0;
  Tape tape;
  const Matrix a = memory_attention(tape.constant(view), tape.constant(keys)).value();
  EXPECT_TRUE(a.allFinite());
  EXPECT_LT((a.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
}
