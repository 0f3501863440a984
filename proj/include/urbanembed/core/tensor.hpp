#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace urbanembed {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Dense tensor of rank 0, 1 or 2 stored as a row-major matrix.
///
/// Rank-0 tensors are 1x1, rank-1 tensors are n x 1 columns. Everything the
/// model touches is at most two-dimensional, so higher ranks are rejected.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix values, bool requires_grad = false);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }

  const Matrix& matrix() const { return values_; }
  Matrix& matrix() { return values_; }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool flag) { requires_grad_ = flag; }

  bool all_finite() const { return values_.allFinite(); }

  // Flat row-major copy of the values.
  std::vector<double> values() const;

 private:
  std::vector<std::size_t> shape_{0, 0};
  Matrix values_;
  bool requires_grad_ = false;
};

std::string shape_string(const Matrix& m);

}  // namespace urbanembed
