#include "urbanembed/core/tensor.hpp"

#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace urbanembed {

Tensor::Tensor(Matrix values, bool requires_grad)
    : shape_{static_cast<std::size_t>(values.rows()), static_cast<std::size_t>(values.cols())},
      values_(std::move(values)),
      requires_grad_(requires_grad) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values, bool requires_grad)
    : shape_(std::move(shape)), requires_grad_(requires_grad) {
  if (shape_.size() > 2) {
    throw std::invalid_argument("Tensor: rank " + std::to_string(shape_.size()) + " not supported");
  }
  const std::size_t count =
      std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
  if (count != values.size()) {
    throw std::invalid_argument("Tensor: shape holds " + std::to_string(count) + " values, got " +
                                std::to_string(values.size()));
  }
  const Eigen::Index rows = shape_.empty() ? 1 : static_cast<Eigen::Index>(shape_[0]);
  const Eigen::Index cols = shape_.size() < 2 ? 1 : static_cast<Eigen::Index>(shape_[1]);
  values_ = Eigen::Map<const Matrix>(values.data(), rows, cols);
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  return Tensor(Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)),
                requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  Tensor t(Matrix::Constant(1, 1, value), requires_grad);
  t.shape_.clear();
  return t;
}

std::vector<double> Tensor::values() const {
  return std::vector<double>(values_.data(), values_.data() + values_.size());
}

std::string shape_string(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace urbanembed
