#pragma once

#include "urbanembed/core/tensor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace urbanembed {

struct RegressionMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  // 1 - SS_res / SS_tot against the mean of `truth`; 0 when SS_tot is 0.
  double r2 = 0.0;
};

RegressionMetrics regression_metrics(const Vector& truth, const Vector& prediction);

struct RegressionReport {
  std::string task;
  double mae = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double l1_weight = 0.0;
  std::size_t folds = 0;
};

// Deterministic shuffle of 0..n-1 (splitmix64-driven Fisher-Yates) cut into
// k contiguous folds; the first n % k folds hold one extra index.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

// `count` log-spaced values in [1e-4 * lambda_max, lambda_max].
std::vector<double> default_l1_grid(const Matrix& x, const Vector& y, std::size_t count = 20);

/// K-fold cross-validated Lasso. Every grid value is scored by its mean
/// held-out MAE over the folds; the best one (first on ties) is reported
/// with its fold-averaged MAE, RMSE and R^2. An empty grid means the default.
RegressionReport kfold_regress(const Matrix& x, const Vector& y, std::size_t k = 5, std::span<const double> l1_grid = {},
                               std::uint64_t seed = 0, const std::string& task = "regression");

}  // namespace urbanembed
