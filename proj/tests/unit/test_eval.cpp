#include "fixtures.hpp"

#include "urbanembed/data/generator.hpp"
#include "urbanembed/eval/clustering.hpp"
#include "urbanembed/eval/lasso.hpp"
#include "urbanembed/eval/regression.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace urbanembed;
using urbanembed::testing::oracles;
using urbanembed::testing::to_matrix;
using urbanembed::testing::to_vector;

TEST(Lasso, MatchesReferenceSolver) {
  const auto& o = oracles()["lasso_kkt"];
  const Matrix x = to_matrix(o["x"]);
  const Vector y = to_vector(o["y"]);
  const LassoModel m = lasso_fit(x, y, o["l1_weight"].get<double>());
  EXPECT_TRUE(m.converged);
  EXPECT_LT((m.coefficients - to_vector(o["coefficients"])).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_NEAR(m.intercept, o["intercept"].get<double>(), 1e-4);
  EXPECT_LE(lasso_kkt_residual(x, y, m), 1e-6);
}

TEST(Lasso, ZeroPenaltyIsLeastSquares) {
  const auto& o = oracles()["lasso_ols"];
  const Matrix x = to_matrix(o["x"]);
  const Vector y = to_vector(o["y"]);
  const LassoModel m = lasso_fit(x, y, 0.0);
  EXPECT_LT((m.coefficients - to_vector(o["coefficients"])).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_NEAR(m.intercept, o["intercept"].get<double>(), 1e-4);
  EXPECT_LE(lasso_kkt_residual(x, y, m), 1e-6);
}

TEST(Lasso, LambdaMaxZeroesEverything) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  Matrix x(40, 4);
  Vector y(40);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = d(rng);
  for (Eigen::Index i = 0; i < 40; ++i) y(i) = x(i, 0) - 2 * x(i, 2) + 0.1 * d(rng);
  const double lmax = lasso_lambda_max(x, y);
  EXPECT_EQ(lasso_fit(x, y, lmax * 1.0001).coefficients.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(lasso_fit(x, y, lmax * 0.5).coefficients.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lasso, ConstantColumnGetsZero) {
  Matrix x(6, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5, 5, 5, 6, 5;
  Vector y(6);
  y << 2, 4, 6, 8, 10, 12;
  const LassoModel m = lasso_fit(x, y, 0.0);
  EXPECT_EQ(m.coefficients(1), 0.0);
  EXPECT_NEAR(m.coefficients(0), 2.0, 1e-6);
  EXPECT_LT((m.predict(x) - y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Regression, MetricsByHand) {
  Vector truth(3), pred(3);
  truth << 1, 2, 3;
  pred << 1, 3, 1;
  const auto m = regression_metrics(truth, pred);
  EXPECT_DOUBLE_EQ(m.mae, 1.0);
  EXPECT_DOUBLE_EQ(m.rmse, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(m.r2, 1.0 - 5.0 / 2.0);
}

TEST(Regression, FoldsMatchOracleAndPartition) {
  const auto& o = oracles()["kfold"];
  const auto folds = make_folds(o["x"].size(), o["k"].get<std::size_t>(),
                                o["seed"].get<std::uint64_t>());
  ASSERT_EQ(folds.size(), o["folds"].size());
  for (std::size_t f = 0; f < folds.size(); ++f) EXPECT_EQ(folds[f], o["folds"][f].get<std::vector<std::size_t>>());

  const auto uneven = make_folds(17, 5, 3);
  std::set<std::size_t> seen;
  for (std::size_t f = 0; f < uneven.size(); ++f) {
    EXPECT_EQ(uneven[f].size(), f < 2 ? 4u : 3u);
    seen.insert(uneven[f].begin(), uneven[f].end());
  }
  EXPECT_EQ(seen.size(), 17u);
  EXPECT_THROW(make_folds(3, 5, 0), std::invalid_argument);
}

TEST(Regression, KFoldMatchesOracle) {
  const auto& o = oracles()["kfold"];
  const auto grid = o["grid"].get<std::vector<double>>();
  const auto r = kfold_regress(to_matrix(o["x"]), to_vector(o["y"]), o["k"].get<std::size_t>(), grid,
                               o["seed"].get<std::uint64_t>(), "demo");
  EXPECT_EQ(r.task, "demo");
  EXPECT_EQ(r.l1_weight, o["l1_weight"].get<double>());
  EXPECT_NEAR(r.mae, o["mae"].get<double>(), 1e-4);
  EXPECT_NEAR(r.rmse, o["rmse"].get<double>(), 1e-4);
  EXPECT_NEAR(r.r2, o["r2"].get<double>(), 1e-4);
}

TEST(KMeans, ReachesExhaustiveOptimum) {
  const auto& o = oracles()["kmeans_exhaustive"];
  const Matrix pts = to_matrix(o["points"]);
  const auto r = kmeans(pts, o["k"].get<std::size_t>(), o["seed"].get<std::uint64_t>());
  EXPECT_LE(r.inertia, o["optimum"].get<double>() * (1 + 1e-4));
  EXPECT_NEAR(r.inertia, inertia(pts, r.assignments), 1e-9);
}

TEST(KMeans, InertiaNeverIncreases) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d;
  Matrix pts(60, 3);
  for (Eigen::Index k = 0; k < pts.size(); ++k) pts.data()[k] = d(rng);
  KMeansOptions opt;
  opt.restarts = 1;
  const auto r = kmeans(pts, 5, 1, opt);
  for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
    EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] + 1e-12);
  }
  const auto again = kmeans(pts, 5, 1, opt);
  EXPECT_EQ(again.assignments, r.assignments);
  EXPECT_THROW(kmeans(pts, 61, 0), std::invalid_argument);
}

TEST(KMeans, RecoversGeneratedDistricts) {
  const Dataset d = generate_city(CityConfig{});
  Matrix raw(d.n_regions(), d.poi.counts.cols() + d.checkins.counts.cols());
  raw << d.poi.counts, d.checkins.counts;
  const auto report = evaluate_clustering(raw, *d.regions.districts, 4, 0);
  EXPECT_GE(report.nmi, 0.9);
}

TEST(Partition, MatchesOracle) {
  const auto& o = oracles()["partition_pair"];
  const auto a = o["a"].get<std::vector<int>>(), b = o["b"].get<std::vector<int>>();
  EXPECT_NEAR(nmi(a, b), o["nmi"].get<double>(), 1e-12);
  EXPECT_NEAR(ari(a, b), o["ari"].get<double>(), 1e-12);
  EXPECT_NEAR(nmi(a, b), nmi(b, a), 1e-15);
}

TEST(Partition, IdenticalIsExactlyOne) {
  const std::vector<int> a{0, 0, 1, 1, 2, 2, 2}, relabel{5, 5, 3, 3, 9, 9, 9};
  EXPECT_EQ(nmi(a, a), 1.0);
  EXPECT_EQ(ari(a, a), 1.0);
  EXPECT_EQ(nmi(a, relabel), 1.0);
  EXPECT_EQ(ari(a, relabel), 1.0);
  const std::vector<int> one(7, 0);
  EXPECT_EQ(nmi(one, one), 1.0);
  EXPECT_EQ(nmi(a, one), 0.0);
}

TEST(Partition, AriAtChanceLevel) {
  std::mt19937_64 rng(0);
  std::uniform_int_distribution<int> label(0, 3);
  double total = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> a(50), b(50);
    for (auto& v : a) v = label(rng);
    for (auto& v : b) v = label(rng);
    total += ari(a, b);
  }
  EXPECT_LT(std::abs(total / 1000.0), 0.05);
}
