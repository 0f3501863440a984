#include "urbanembed/graph/graphs.hpp"

#include "../data/csv.hpp"
#include "urbanembed/core/ops.hpp"

#include <fstream>
#include <stdexcept>

namespace urbanembed {

const char* view_tag(View v) {
  switch (v) {
    case View::Origin: return "O";
    case View::Destination: return "D";
    case View::Function: return "F";
    case View::Semantics: return "S";
  }
  return "?";
}

Matrix trip_counts(const TripSet& trips, std::size_t n_regions) {
  trips.validate(n_regions);
  const auto n = static_cast<Eigen::Index>(n_regions);
  Matrix counts = Matrix::Zero(n, n);
  for (const Trip& t : trips.trips) {
    counts(static_cast<Eigen::Index>(t.origin), static_cast<Eigen::Index>(t.destination)) += 1.0;
  }
  return counts;
}

ContextDistributions context_distributions(const Matrix& counts) {
  if (counts.rows() != counts.cols()) throw std::invalid_argument("context_distributions: counts must be square");
  if ((counts.array() < 0.0).any()) throw std::invalid_argument("context_distributions: negative counts");
  ContextDistributions ctx{counts, counts.transpose()};
  for (Matrix* m : {&ctx.origin, &ctx.destination}) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      const double total = m->row(i).sum();
      if (total > 0.0) m->row(i) /= total;
    }
  }
  return ctx;
}

MobilityGraphs mobility_graphs(const ContextDistributions& contexts) {
  return MobilityGraphs{DependencyGraph{View::Origin, pairwise_cosine(contexts.origin), 0.0},
                        DependencyGraph{View::Destination, pairwise_cosine(contexts.destination), 0.0}};
}

DependencyGraph feature_graph(const FeatureTable& table, View view) {
  if ((table.counts.array() < 0.0).any()) throw std::invalid_argument("feature_graph: negative counts");
  return DependencyGraph{view, pairwise_cosine(table.counts), 0.0};
}

DependencyGraph cleanse(const DependencyGraph& graph) {
  DependencyGraph out = graph;
  out.weights = soft_threshold(graph.weights, graph.threshold);
  return out;
}

Var cleanse(Tape& tape, const Matrix& weights, Var threshold) {
  return ad::soft_threshold(tape.constant(weights), threshold);
}

GraphSet build_graphs(const Dataset& data) {
  GraphSet set;
  set.trip_counts = trip_counts(data.trips, data.n_regions());
  auto mobility = mobility_graphs(context_distributions(set.trip_counts));
  set.graphs[view_index(View::Origin)] = std::move(mobility.origin);
  set.graphs[view_index(View::Destination)] = std::move(mobility.destination);
  set.graphs[view_index(View::Function)] = feature_graph(data.poi, View::Function);
  set.graphs[view_index(View::Semantics)] = feature_graph(data.checkins, View::Semantics);
  return set;
}

void dump_graphs(const GraphSet& graphs, const std::filesystem::path& dir) {
  for (View v : kAllViews) {
    const auto path = dir / (std::string("graph_") + view_tag(v) + ".csv");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const Matrix& w = graphs[v].weights;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (j) out << ',';
        out << csv::format_double(w(i, j));
      }
      out << '\n';
    }
  }
}

}  // namespace urbanembed
