#pragma once

#include "urbanembed/core/tensor.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace urbanembed {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode gradient tape over dense matrices.
///
/// Values are immutable once recorded. `backward` runs once, visiting every
/// recorded node in reverse order; gradients accumulate additively when a
/// value feeds several consumers.
class Tape {
 public:
  // Receives the upstream gradient and the node's own forward value.
  using Pullback = std::function<void(Tape&, const Matrix& upstream, const Matrix& output)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var variable(Matrix value);
  // Leaf that is also entered in the parameter registry under `name`.
  Var parameter(const std::string& name, const Matrix& value);

  // Used by op implementations. The node needs a gradient iff any input does.
  // Throws NumericalError if `value` is not finite.
  Var record(Matrix value, std::span<const Var> inputs, Pullback pullback);

  void accumulate(Var target, const Matrix& gradient);
  bool needs_grad(Var v) const { return nodes_[v.id_].needs_grad; }

  void backward(Var output);

  const Matrix& value(Var v) const { return nodes_[v.id_].value; }
  // Zero matrix of the right shape when nothing reached `v`.
  Matrix gradient(Var v) const;

  const std::vector<std::pair<std::string, Var>>& parameters() const { return parameters_; }
  std::map<std::string, Matrix> parameter_gradients() const;

  std::size_t size() const { return nodes_.size(); }
  std::size_t backward_visits() const { return backward_visits_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    bool has_grad = false;
    Pullback pullback;
  };

  Var push(Node node);
  void check_owner(Var v) const;

  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, Var>> parameters_;
  bool backward_done_ = false;
  std::size_t backward_visits_ = 0;
};

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Differentiable operations. All inputs must live on the same tape.
namespace ad {

Var matmul(Var a, Var b);
// a * b^T
Var matmul_nt(Var a, Var b);
Var transpose(Var a);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double factor);
// `s` is 1x1.
Var scale_by(Var a, Var s);
// 1 - a
Var one_minus(Var a);
Var sigmoid(Var a);
Var add_n(std::span<const Var> terms);
Var mean_n(std::span<const Var> terms);

// Broadcast b (1 x c or 1 x 1) over the rows of a.
Var add_bias(Var a, Var b);
// Scale row i of a (n x c) by w(i) where w is n x 1.
Var mul_rows(Var a, Var w);

// Softmax along each row; masked-out entries are excluded and output 0.
Var softmax_rows(Var a, const BoolMatrix& mask = {});
// Softmax down each column.
Var softmax_cols(Var a);
// Log of the column softmax.
Var log_softmax_cols(Var a);
// Divide each row by its sum. Rows must have positive sums.
Var l1_normalize_rows(Var a);
// Divide each row by its Euclidean norm; zero rows stay zero.
Var l2_normalize_rows(Var a);

// Elementwise soft threshold; `tau` is a 1x1 var holding a value >= 0.
Var soft_threshold(Var a, Var tau);

Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index count);

// Scalar (1x1) reductions.
Var sum(Var a);
Var sum_squares(Var a);
// -sum_ij weights(i,j) * log(max(p(i,j), floor))
Var weighted_nll(Var p, const Matrix& weights, double floor);

}  // namespace ad

}  // namespace urbanembed
