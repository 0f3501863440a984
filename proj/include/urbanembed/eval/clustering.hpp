#pragma once

#include "urbanembed/core/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace urbanembed {

struct KMeansOptions {
  std::size_t max_iterations = 300;
  // Independent k-means++ restarts; the lowest-inertia run wins.
  std::size_t restarts = 10;
};

struct KMeansResult {
  std::vector<int> assignments;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  // Inertia after each assignment step of the winning run.
  std::vector<double> inertia_history;
};

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing (or max_iterations). An emptied cluster is re-seeded at the
/// point farthest from its centroid. Deterministic for a fixed seed.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

double inertia(const Matrix& points, std::span<const int> assignments);

/// Normalised mutual information with arithmetic-mean normalisation.
/// Exactly 1 for identical partitions up to relabelling (including two
/// single-cluster partitions); 0 when only one side is a single cluster.
double nmi(std::span<const int> a, std::span<const int> b);

/// Adjusted Rand index from pair counts of the contingency table.
double ari(std::span<const int> a, std::span<const int> b);

struct ClusteringReport {
  std::size_t clusters = 0;
  double nmi = 0.0;
  double ari = 0.0;
  std::vector<int> assignments;
};

ClusteringReport evaluate_clustering(const Matrix& embedding, std::span<const int> labels, std::size_t k,
                                     std::uint64_t seed);

}  // namespace urbanembed
