#pragma once

#include "urbanembed/core/autodiff.hpp"
#include "urbanembed/data/dataset.hpp"

#include <array>
#include <string>

namespace urbanembed {

enum class View { Origin = 0, Destination = 1, Function = 2, Semantics = 3 };

inline constexpr std::array<View, 4> kAllViews = {View::Origin, View::Destination, View::Function, View::Semantics};

// "O", "D", "F", "S"
const char* view_tag(View v);
inline std::size_t view_index(View v) { return static_cast<std::size_t>(v); }

/// Dense N x N region dependency matrix for one view plus its cleansing
/// threshold. Entries are cosine similarities, so they lie in [-1, 1].
struct DependencyGraph {
  View view = View::Origin;
  Matrix weights;
  double threshold = 0.0;
};

// counts(i, j) = number of trips from region i to region j.
Matrix trip_counts(const TripSet& trips, std::size_t n_regions);

struct ContextDistributions {
  Matrix origin;       // row i: where trips leaving i go
  Matrix destination;  // row i: where trips arriving at i come from
};

// Regions without outgoing (incoming) trips get an all-zero origin
// (destination) row.
ContextDistributions context_distributions(const Matrix& counts);

struct MobilityGraphs {
  DependencyGraph origin;
  DependencyGraph destination;
};

MobilityGraphs mobility_graphs(const ContextDistributions& contexts);

// Pairwise cosine of the table rows; pass View::Function for POI counts and
// View::Semantics for check-in counts.
DependencyGraph feature_graph(const FeatureTable& table, View view = View::Function);

/// Soft-thresholds the weights with the graph's own threshold.
DependencyGraph cleanse(const DependencyGraph& graph);

// Differentiable form used during training; `threshold` is a 1x1 var.
Var cleanse(Tape& tape, const Matrix& weights, Var threshold);

struct GraphSet {
  std::array<DependencyGraph, 4> graphs;
  Matrix trip_counts;

  const DependencyGraph& operator[](View v) const { return graphs[view_index(v)]; }
  std::size_t n_regions() const { return static_cast<std::size_t>(trip_counts.rows()); }
};

GraphSet build_graphs(const Dataset& data);

// Writes graph_<tag>.csv files (N x N, no header) into `dir`.
void dump_graphs(const GraphSet& graphs, const std::filesystem::path& dir);

}  // namespace urbanembed
