#include "fixtures.hpp"

#include "urbanembed/data/generator.hpp"
#include "urbanembed/graph/graphs.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace urbanembed;
using urbanembed::testing::max_abs_diff;
using urbanembed::testing::oracles;
using urbanembed::testing::TempDir;
using urbanembed::testing::to_matrix;

namespace {

TripSet trips_from(const nlohmann::json& rows) {
  TripSet t;
  for (const auto& r : rows) t.trips.push_back({r[0].get<std::size_t>(), r[1].get<std::size_t>()});
  return t;
}

}  // namespace

TEST(Graphs, TripCountsMatchOracle) {
  const auto& o = oracles()["trip_counts"];
  EXPECT_EQ(trip_counts(trips_from(o["trips"]), o["n_regions"].get<std::size_t>()), to_matrix(o["expected"]));
}

TEST(Graphs, ContextRowsMatchOracle) {
  const auto& o = oracles()["context_row"];
  const auto ctx = context_distributions(to_matrix(o["counts"]));
  EXPECT_LT(max_abs_diff(ctx.origin, to_matrix(o["expected_origin"])), 1e-12);
}

TEST(Graphs, ContextRowsWithoutTripsStayZero) {
  Matrix counts = Matrix::Zero(3, 3);
  counts(0, 1) = 2;
  const auto ctx = context_distributions(counts);
  EXPECT_EQ(ctx.origin.row(1).sum(), 0.0);
  EXPECT_EQ(ctx.origin(0, 1), 1.0);
  EXPECT_EQ(ctx.destination(1, 0), 1.0);
}

TEST(Graphs, MobilityGraphsMatchOracle) {
  const auto& o = oracles()["mobility_graphs"];
  const auto g = mobility_graphs(context_distributions(to_matrix(o["counts"])));
  EXPECT_LT(max_abs_diff(g.origin.weights, to_matrix(o["expected_origin"])), 1e-12);
  EXPECT_LT(max_abs_diff(g.destination.weights, to_matrix(o["expected_destination"])), 1e-12);
  EXPECT_EQ(g.origin.view, View::Origin);
  EXPECT_EQ(g.destination.view, View::Destination);
}

TEST(Graphs, FeatureGraphMatchesOracle) {
  const auto& o = oracles()["feature_graph"];
  FeatureTable t;
  t.counts = to_matrix(o["table"]);
  EXPECT_LT(max_abs_diff(feature_graph(t).weights, to_matrix(o["expected"])), 1e-12);
  t.counts(0, 0) = -1;
  EXPECT_THROW(feature_graph(t), std::invalid_argument);
}

TEST(Graphs, CleanseShrinksTowardZero) {
  DependencyGraph g{View::Function, Matrix(2, 2), 0.25};
  g.weights << 1.0, 0.2, -0.5, 0.0;
  const auto c = cleanse(g);
  Matrix expected(2, 2);
  expected << 0.75, 0.0, -0.25, 0.0;
  EXPECT_LT(max_abs_diff(c.weights, expected), 1e-15);

  Tape tape;
  Var tau = tape.variable(Matrix::Constant(1, 1, 0.25));
  EXPECT_LT(max_abs_diff(cleanse(tape, g.weights, tau).value(), expected), 1e-15);
}

TEST(Graphs, BuiltGraphsAreSymmetricCosines) {
  CityConfig c;
  c.n_regions = 12;
  const Dataset d = generate_city(c);
  const GraphSet g = build_graphs(d);
  EXPECT_EQ(g.n_regions(), 12u);
  EXPECT_DOUBLE_EQ(g.trip_counts.sum(), static_cast<double>(d.trips.size()));
  for (View v : kAllViews) {
    const Matrix& w = g[v].weights;
    EXPECT_EQ(g[v].view, v);
    EXPECT_EQ(w, w.transpose()) << view_tag(v);
    EXPECT_LE(w.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(Graphs, DumpWritesOneFilePerView) {
  CityConfig c;
  c.n_regions = 5;
  c.n_districts = 2;
  const GraphSet g = build_graphs(generate_city(c));
  TempDir tmp;
  dump_graphs(g, tmp.path());
  for (View v : kAllViews) {
    const auto text = urbanembed::testing::read_file(tmp.path() / (std::string("graph_") + view_tag(v) + ".csv"));
    std::istringstream in(text);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    }
    EXPECT_EQ(rows, 5);
  }
}
