#include "urbanembed/eval/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace urbanembed {
namespace {

struct Contingency {
  std::vector<std::vector<std::int64_t>> cells;
  std::vector<std::int64_t> rows;
  std::vector<std::int64_t> cols;
  std::int64_t total = 0;
};

std::vector<int> dense_labels(std::span<const int> labels, std::size_t& count) {
  std::map<int, int> codes;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(codes.emplace(l, static_cast<int>(codes.size())).first->second);
  count = codes.size();
  return out;
}

Contingency contingency(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("label vectors differ in length (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  std::size_t ka = 0, kb = 0;
  const auto da = dense_labels(a, ka);
  const auto db = dense_labels(b, kb);
  Contingency c;
  c.cells.assign(ka, std::vector<std::int64_t>(kb, 0));
  c.rows.assign(ka, 0);
  c.cols.assign(kb, 0);
  for (std::size_t i = 0; i < da.size(); ++i) {
    ++c.cells[static_cast<std::size_t>(da[i])][static_cast<std::size_t>(db[i])];
    ++c.rows[static_cast<std::size_t>(da[i])];
    ++c.cols[static_cast<std::size_t>(db[i])];
  }
  c.total = static_cast<std::int64_t>(a.size());
  return c;
}

double entropy(const std::vector<std::int64_t>& counts, double n) {
  double h = 0.0;
  for (auto c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

bool is_relabeling(const Contingency& c) {
  if (c.rows.size() != c.cols.size()) return false;
  for (const auto& row : c.cells) {
    if (std::count_if(row.begin(), row.end(), [](std::int64_t v) { return v != 0; }) != 1) return false;
  }
  return true;
}

std::int64_t pairs(std::int64_t n) { return n * (n - 1) / 2; }

double squared_distance(const Matrix& points, Eigen::Index i, const Matrix& centroids, Eigen::Index c) {
  return (points.row(i) - centroids.row(c)).squaredNorm();
}

std::vector<Eigen::Index> plus_plus_seeds(const Matrix& points, std::size_t k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> chosen;
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  chosen.push_back(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const Eigen::Index last = chosen.back();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - points.row(last)).squaredNorm());
      total += d2[static_cast<std::size_t>(i)];
    }
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> pick(d2.begin(), d2.end());
      chosen.push_back(pick(rng));
    } else {
      // All remaining points coincide with a seed; take the next unused index.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
          chosen.push_back(i);
          break;
        }
      }
    }
  }
  return chosen;
}

KMeansResult lloyd(const Matrix& points, std::size_t k, std::mt19937_64& rng, std::size_t max_iterations) {
  const Eigen::Index n = points.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  KMeansResult r;
  r.centroids.resize(kk, points.cols());
  const auto seeds = plus_plus_seeds(points, k, rng);
  for (Eigen::Index c = 0; c < kk; ++c) r.centroids.row(c) = points.row(seeds[static_cast<std::size_t>(c)]);
  r.assignments.assign(static_cast<std::size_t>(n), -1);

  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = squared_distance(points, i, r.centroids, 0);
      for (Eigen::Index c = 1; c < kk; ++c) {
        const double d = squared_distance(points, i, r.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignments[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
        r.assignments[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    r.iterations = iter;

    std::vector<std::size_t> sizes(k, 0);
    for (int a : r.assignments) ++sizes[static_cast<std::size_t>(a)];
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (sizes[static_cast<std::size_t>(c)] != 0) continue;
      // Move an empty cluster onto the point farthest from its own centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = r.assignments[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(owner)] <= 1) continue;
        const double d = squared_distance(points, i, r.centroids, owner);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d < 0.0) continue;
      --sizes[static_cast<std::size_t>(r.assignments[static_cast<std::size_t>(far)])];
      r.assignments[static_cast<std::size_t>(far)] = static_cast<int>(c);
      sizes[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }
    r.inertia_history.push_back(inertia(points, r.assignments));

    Matrix sums = Matrix::Zero(kk, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) sums.row(r.assignments[static_cast<std::size_t>(i)]) += points.row(i);
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) {
        r.centroids.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
      }
    }
    if (!changed) break;
  }
  r.inertia = inertia(points, r.assignments);
  return r;
}

}  // namespace

double inertia(const Matrix& points, std::span<const int> assignments) {
  if (static_cast<Eigen::Index>(assignments.size()) != points.rows()) {
    throw std::invalid_argument("inertia: assignment count mismatch");
  }
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(assignments[static_cast<std::size_t>(i)]) += points.row(i);
    sizes[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])] += 1.0;
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = assignments[static_cast<std::size_t>(i)];
    total += (points.row(i) - sums.row(c) / sizes[static_cast<std::size_t>(c)]).squaredNorm();
  }
  return total;
}

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (k > static_cast<std::size_t>(points.rows())) {
    throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " exceeds " + std::to_string(points.rows()) +
                                " points");
  }
  if (!points.allFinite()) throw std::invalid_argument("kmeans: non-finite input");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  for (std::size_t run = 0; run < std::max<std::size_t>(options.restarts, 1); ++run) {
    KMeansResult r = lloyd(points, k, rng, options.max_iterations);
    if (run == 0 || r.inertia < best.inertia) best = std::move(r);
  }
  return best;
}

double nmi(std::span<const int> a, std::span<const int> b) {
  const Contingency c = contingency(a, b);
  if (c.total == 0) return 1.0;
  if (c.rows.size() == 1 && c.cols.size() == 1) return 1.0;
  if (is_relabeling(c)) return 1.0;
  const double n = static_cast<double>(c.total);
  const double ha = entropy(c.rows, n);
  const double hb = entropy(c.cols, n);
  const double denom = 0.5 * (ha + hb);
  if (denom <= 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    for (std::size_t j = 0; j < c.cols.size(); ++j) {
      const auto nij = c.cells[i][j];
      if (nij == 0) continue;
      mi += static_cast<double>(nij) / n *
            std::log(n * static_cast<double>(nij) / (static_cast<double>(c.rows[i]) * static_cast<double>(c.cols[j])));
    }
  }
  return std::clamp(mi / denom, 0.0, 1.0);
}

double ari(std::span<const int> a, std::span<const int> b) {
  const Contingency c = contingency(a, b);
  std::int64_t index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& row : c.cells) {
    for (auto v : row) index += pairs(v);
  }
  for (auto v : c.rows) sum_rows += pairs(v);
  for (auto v : c.cols) sum_cols += pairs(v);
  const double total_pairs = static_cast<double>(pairs(c.total));
  if (total_pairs == 0.0) return 1.0;
  const double expected = static_cast<double>(sum_rows) * static_cast<double>(sum_cols) / total_pairs;
  const double maximum = 0.5 * static_cast<double>(sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (static_cast<double>(index) - expected) / (maximum - expected);
}

ClusteringReport evaluate_clustering(const Matrix& embedding, std::span<const int> labels, std::size_t k,
                                     std::uint64_t seed) {
  if (static_cast<Eigen::Index>(labels.size()) != embedding.rows()) {
    throw std::invalid_argument("evaluate_clustering: label count mismatch");
  }
  ClusteringReport report;
  report.clusters = k;
  report.assignments = kmeans(embedding, k, seed).assignments;
  report.nmi = nmi(labels, report.assignments);
  report.ari = ari(labels, report.assignments);
  return report;
}

}  // namespace urbanembed
