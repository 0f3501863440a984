#include "urbanembed/eval/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urbanembed {
namespace {

struct Standardized {
  Matrix z;
  Vector mean;
  Vector scale;
};

Standardized standardize(const Matrix& x) {
  Standardized s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.z = x.rowwise() - s.mean.transpose();
  s.scale = (s.z.colwise().squaredNorm().transpose() / n).cwiseSqrt();
  for (Eigen::Index j = 0; j < s.z.cols(); ++j) {
    // Relative cutoff so columns that are constant up to rounding count as constant.
    if (s.scale(j) <= 1e-12 * std::max(1.0, std::abs(s.mean(j)))) {
      s.scale(j) = 0.0;
      s.z.col(j).setZero();
    } else {
      s.z.col(j) /= s.scale(j);
    }
  }
  return s;
}

void check_inputs(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw std::invalid_argument("lasso: X has " + std::to_string(x.rows()) + " rows, y has " +
                                                        std::to_string(y.size()));
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("lasso: empty design matrix");
  if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("lasso: non-finite input");
}

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

double kkt_violation(const Matrix& z, const Vector& residual, const Vector& w, const Vector& scale, double lambda) {
  const double n = static_cast<double>(z.rows());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (scale(j) == 0.0) continue;
    const double g = z.col(j).dot(residual) / n;
    const double v = w(j) != 0.0 ? std::abs(g - lambda * (w(j) > 0 ? 1.0 : -1.0)) : std::max(0.0, std::abs(g) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

Vector LassoModel::predict(const Matrix& x) const {
  if (x.cols() != coefficients.size()) throw std::invalid_argument("LassoModel::predict: feature count mismatch");
  return (x * coefficients).array() + intercept;
}

LassoModel lasso_fit(const Matrix& x, const Vector& y, double l1_weight, const LassoOptions& options) {
  check_inputs(x, y);
  if (!(l1_weight >= 0.0)) throw std::invalid_argument("lasso: l1 weight must be non-negative");
  const auto s = standardize(x);
  const double n = static_cast<double>(x.rows());
  const double y_mean = y.mean();

  Vector w = Vector::Zero(x.cols());
  Vector residual = y.array() - y_mean;
  LassoModel model;
  model.l1_weight = l1_weight;
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (s.scale(j) == 0.0) continue;
      const double old = w(j);
      const double rho = s.z.col(j).dot(residual) / n + old;
      const double updated = soft(rho, l1_weight);
      if (updated != old) {
        residual -= (updated - old) * s.z.col(j);
        w(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    model.sweeps = sweep;
    if (max_change < options.tolerance &&
        kkt_violation(s.z, residual, w, s.scale, l1_weight) < options.tolerance) {
      model.converged = true;
      break;
    }
  }

  model.standardized_coefficients = w;
  model.column_mean = s.mean;
  model.column_scale = s.scale;
  model.coefficients = Vector::Zero(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (s.scale(j) != 0.0) model.coefficients(j) = w(j) / s.scale(j);
  }
  model.intercept = y_mean - model.coefficients.dot(s.mean);
  return model;
}

double lasso_lambda_max(const Matrix& x, const Vector& y) {
  check_inputs(x, y);
  const auto s = standardize(x);
  const Vector centered = y.array() - y.mean();
  return (s.z.transpose() * centered).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

double lasso_kkt_residual(const Matrix& x, const Vector& y, const LassoModel& model) {
  check_inputs(x, y);
  const auto s = standardize(x);
  const Vector residual = (y.array() - y.mean()).matrix() - s.z * model.standardized_coefficients;
  return kkt_violation(s.z, residual, model.standardized_coefficients, s.scale, model.l1_weight);
}

}  // namespace urbanembed
