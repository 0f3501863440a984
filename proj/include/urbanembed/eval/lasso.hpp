#pragma once

#include "urbanembed/core/tensor.hpp"

#include <cstddef>

namespace urbanembed {

struct LassoOptions {
  double tolerance = 1e-7;
  std::size_t max_sweeps = 10000;
};

/// Lasso fit on internally standardised features.
///
/// Minimises 0.5 * ||y - Zw - b||^2 / N + l1_weight * ||w||_1 where Z is X
/// with every column shifted to zero mean and scaled to unit (population)
/// variance. Constant columns get coefficient 0.
struct LassoModel {
  Vector coefficients;  // on the original feature scale
  double intercept = 0.0;
  Vector standardized_coefficients;
  Vector column_mean;
  Vector column_scale;  // 0 marks a constant column
  double l1_weight = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;

  Vector predict(const Matrix& x) const;
};

LassoModel lasso_fit(const Matrix& x, const Vector& y, double l1_weight, const LassoOptions& options = {});

// Smallest l1 weight at which every coefficient is zero: max|Z^T (y - mean y)| / N.
double lasso_lambda_max(const Matrix& x, const Vector& y);

/// Largest violation of the subgradient optimality conditions of `model` on
/// (x, y), measured in the standardised space the model was fitted in.
double lasso_kkt_residual(const Matrix& x, const Vector& y, const LassoModel& model);

}  // namespace urbanembed
