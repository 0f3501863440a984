#pragma once

#include "urbanembed/core/autodiff.hpp"
#include "urbanembed/data/dataset.hpp"

namespace urbanembed {

inline constexpr double kLogFloor = 1e-12;

struct OdDistributions {
  Var origin;       // row i: P(destination j | origin i)
  Var destination;  // row i: P(origin j | destination i)
};

OdDistributions od_distributions(Var origin_embedding, Var destination_embedding);

struct OdMatrices {
  Matrix origin;
  Matrix destination;
};
OdMatrices od_distributions(const Matrix& origin_embedding, const Matrix& destination_embedding);

// Sum over trips (i -> j) of -log P_O(j | i) - log P_D(i | j), using the
// trip-count matrix as weights.
Var loss_odp(const OdDistributions& dist, const Matrix& trip_counts);
double loss_odp(const Matrix& p_origin, const Matrix& p_destination, const TripSet& trips);

// sum_ij (target_ij - e_i . e_j)^2
Var loss_reconstruction(Var embedding, Var target);
double loss_reconstruction(const Matrix& embedding, const Matrix& target);

// Fraction of trips whose destination is the most probable one under
// P_O(. | origin); ties resolve to the lowest index.
double od_argmax_accuracy(const Matrix& p_origin, const TripSet& trips);

struct LossComponents {
  double odp = 0.0;
  double fp = 0.0;
  double sp = 0.0;
};

// Unweighted sum. Throws NumericalError naming the first non-finite term.
double total_loss(const LossComponents& parts);

}  // namespace urbanembed
