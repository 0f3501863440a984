#include "urbanembed/train/losses.hpp"

#include "urbanembed/core/ops.hpp"
#include "urbanembed/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urbanembed {

OdDistributions od_distributions(Var origin_embedding, Var destination_embedding) {
  if (origin_embedding.rows() != destination_embedding.rows() ||
      origin_embedding.cols() != destination_embedding.cols()) {
    throw std::invalid_argument("od_distributions: embedding shapes differ");
  }
  return OdDistributions{ad::softmax_rows(ad::matmul_nt(origin_embedding, destination_embedding)),
                         ad::softmax_rows(ad::matmul_nt(destination_embedding, origin_embedding))};
}

OdMatrices od_distributions(const Matrix& origin_embedding, const Matrix& destination_embedding) {
  Tape tape;
  auto d = od_distributions(tape.constant(origin_embedding), tape.constant(destination_embedding));
  return OdMatrices{d.origin.value(), d.destination.value()};
}

Var loss_odp(const OdDistributions& dist, const Matrix& trip_counts) {
  Var forward = ad::weighted_nll(dist.origin, trip_counts, kLogFloor);
  Var backward = ad::weighted_nll(dist.destination, trip_counts.transpose(), kLogFloor);
  return ad::add(forward, backward);
}

double loss_odp(const Matrix& p_origin, const Matrix& p_destination, const TripSet& trips) {
  trips.validate(static_cast<std::size_t>(p_origin.rows()));
  double total = 0.0;
  for (const Trip& t : trips.trips) {
    const auto i = static_cast<Eigen::Index>(t.origin);
    const auto j = static_cast<Eigen::Index>(t.destination);
    total -= std::log(std::max(p_origin(i, j), kLogFloor));
    total -= std::log(std::max(p_destination(j, i), kLogFloor));
  }
  return total;
}

Var loss_reconstruction(Var embedding, Var target) {
  if (target.rows() != embedding.rows() || target.cols() != embedding.rows()) {
    throw std::invalid_argument("loss_reconstruction: target " + shape_string(target.value()) + " for embedding " +
                                shape_string(embedding.value()));
  }
  return ad::sum_squares(ad::sub(target, ad::matmul_nt(embedding, embedding)));
}

double loss_reconstruction(const Matrix& embedding, const Matrix& target) {
  Tape tape;
  return loss_reconstruction(tape.constant(embedding), tape.constant(target)).scalar();
}

double total_loss(const LossComponents& parts) {
  if (!std::isfinite(parts.odp)) throw NumericalError("loss component L_ODP is not finite");
  if (!std::isfinite(parts.fp)) throw NumericalError("loss component L_FP is not finite");
  if (!std::isfinite(parts.sp)) throw NumericalError("loss component L_SP is not finite");
  return parts.odp + parts.fp + parts.sp;
}

double od_argmax_accuracy(const Matrix& p_origin, const TripSet& trips) {
  if (trips.trips.empty()) return 0.0;
  trips.validate(static_cast<std::size_t>(p_origin.rows()));
  std::size_t hits = 0;
  for (const Trip& t : trips.trips) {
    Eigen::Index best = 0;
    p_origin.row(static_cast<Eigen::Index>(t.origin)).maxCoeff(&best);
    if (static_cast<std::size_t>(best) == t.destination) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trips.trips.size());
}

}  // namespace urbanembed
