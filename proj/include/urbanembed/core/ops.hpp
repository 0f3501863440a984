#pragma once

#include "urbanembed/core/tensor.hpp"

#include <span>
#include <vector>

namespace urbanembed {

/// Numerically stable softmax (max-subtracted). Throws on empty or NaN input.
std::vector<double> softmax(std::span<const double> x);

/// Cosine similarity; 0 when either operand has zero norm.
double cosine_sim(std::span<const double> a, std::span<const double> b);

/// Shrinkage operator: x - tau above the band, x + tau below it, 0 inside.
double soft_threshold(double x, double tau);
Matrix soft_threshold(const Matrix& x, double tau);
Tensor soft_threshold(const Tensor& x, double tau);

// d/dx of soft_threshold: 1 outside the closed band [-tau, tau], 0 inside.
double soft_threshold_dx(double x, double tau);
// d/dtau of soft_threshold: -sign(x) outside the band, 0 inside.
double soft_threshold_dtau(double x, double tau);

// Row-wise softmax of a matrix. Entries where mask is false are excluded and
// come out as exactly 0; an empty mask means "all entries".
Matrix softmax_rows(const Matrix& x, const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& mask = {});

// x minus the log-sum-exp of its column: log of the column softmax, computed
// without forming the (possibly underflowing) probabilities.
Matrix log_softmax_cols(const Matrix& x);

// Pairwise cosine similarity between the rows of `rows`, exactly symmetric,
// clamped to [-1, 1]; zero rows give zero similarity everywhere.
Matrix pairwise_cosine(const Matrix& rows);

}  // namespace urbanembed
