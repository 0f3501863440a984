#include "urbanembed/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urbanembed {

std::vector<double> softmax(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("softmax: empty input");
  double peak = x[0];
  for (double v : x) {
    if (std::isnan(v)) throw std::invalid_argument("softmax: NaN input");
    peak = std::max(peak, v);
  }
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_sim: length mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double soft_threshold(double x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

Matrix soft_threshold(const Matrix& x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  return x.unaryExpr([tau](double v) { return v > tau ? v - tau : (v < -tau ? v + tau : 0.0); });
}

Tensor soft_threshold(const Tensor& x, double tau) {
  Tensor out(soft_threshold(x.matrix(), tau), x.requires_grad());
  return out;
}

double soft_threshold_dx(double x, double tau) { return (x > tau || x < -tau) ? 1.0 : 0.0; }

double soft_threshold_dtau(double x, double tau) {
  if (x > tau) return -1.0;
  if (x < -tau) return 1.0;
  return 0.0;
}

Matrix softmax_rows(const Matrix& x,
                    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& mask) {
  const bool masked = mask.size() != 0;
  if (masked && (mask.rows() != x.rows() || mask.cols() != x.cols())) {
    throw std::invalid_argument("softmax_rows: mask shape mismatch");
  }
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (!masked || mask(i, j)) peak = std::max(peak, x(i, j));
    }
    if (!std::isfinite(peak)) throw std::invalid_argument("softmax_rows: row has no admissible entries");
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (!masked || mask(i, j)) {
        out(i, j) = std::exp(x(i, j) - peak);
        total += out(i, j);
      }
    }
    out.row(i) /= total;
  }
  return out;
}

Matrix log_softmax_cols(const Matrix& x) {
  if (x.rows() == 0) throw std::invalid_argument("log_softmax_cols: empty input");
  const Eigen::RowVectorXd peak = x.colwise().maxCoeff();
  const Eigen::RowVectorXd lse =
      peak.array() + (x.rowwise() - peak).array().exp().colwise().sum().log();
  return x.rowwise() - lse;
}

Matrix pairwise_cosine(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  Vector norms = rows.rowwise().norm();
  Matrix unit = rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms(i) > 0.0) unit.row(i) /= norms(i);
  }
  Matrix sim = unit * unit.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = std::clamp(sim(i, j), -1.0, 1.0);
      if (norms(i) == 0.0 || norms(j) == 0.0) {
        v = 0.0;
      } else if (i == j) {
        v = 1.0;
      }
      sim(i, j) = v;
      sim(j, i) = v;
    }
  }
  return sim;
}

}  // namespace urbanembed
