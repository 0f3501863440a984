#include "urbanembed/core/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urbanembed {

GradientMap finite_diff_grad(const LossFunction& loss, const ParameterSet& params, double epsilon,
                             const std::vector<std::string>& only, Stencil stencil) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("finite_diff_grad: epsilon must be positive");

  const double first = loss(params);
  const double second = loss(params);
  if (first != second && !(std::isnan(first) && std::isnan(second))) {
    throw std::runtime_error("finite_diff_grad: loss function is not deterministic");
  }

  ParameterSet probe = params;
  GradientMap out;
  for (Parameter& p : probe.items()) {
    if (!only.empty() && std::find(only.begin(), only.end(), p.name) == only.end()) continue;
    Matrix& value = p.value.matrix();
    Matrix grad(value.rows(), value.cols());
    for (Eigen::Index k = 0; k < value.size(); ++k) {
      double& slot = value.data()[k];
      const double original = slot;
      auto at = [&](double offset) {
        slot = original + offset;
        const double v = loss(probe);
        slot = original;
        return v;
      };
      if (stencil == Stencil::ThreePoint) {
        grad.data()[k] = (at(epsilon) - at(-epsilon)) / (2.0 * epsilon);
      } else {
        grad.data()[k] =
            (8.0 * (at(epsilon) - at(-epsilon)) - (at(2.0 * epsilon) - at(-2.0 * epsilon))) / (12.0 * epsilon);
      }
    }
    out.emplace(p.name, std::move(grad));
  }
  return out;
}

GradientComparison compare_gradients(const GradientMap& analytic, const GradientMap& numeric, double relative_tol,
                                     double absolute_tol, double small_magnitude) {
  GradientComparison result;
  for (const auto& [name, num] : numeric) {
    const auto it = analytic.find(name);
    if (it == analytic.end()) {
      // Unreached parameter: analytic gradient is zero.
      const double worst = num.cwiseAbs().maxCoeff();
      result.max_absolute_error = std::max(result.max_absolute_error, worst);
      result.compared += static_cast<std::size_t>(num.size());
      if (worst > absolute_tol) {
        result.ok = false;
        result.worst_parameter = name;
      }
      continue;
    }
    const Matrix& ana = it->second;
    if (ana.rows() != num.rows() || ana.cols() != num.cols()) {
      throw std::invalid_argument("compare_gradients: shape mismatch for '" + name + "'");
    }
    for (Eigen::Index k = 0; k < ana.size(); ++k) {
      const double a = ana.data()[k];
      const double n = num.data()[k];
      ++result.compared;
      if (std::abs(a) < small_magnitude) {
        const double err = std::abs(a - n);
        if (err > result.max_absolute_error) result.max_absolute_error = err;
        if (err > absolute_tol) {
          result.ok = false;
          result.worst_parameter = name;
        }
      } else {
        const double err = std::abs(a - n) / std::max(std::abs(a), std::abs(n));
        if (err > result.max_relative_error) {
          result.max_relative_error = err;
          if (err > relative_tol) result.worst_parameter = name;
        }
        if (err > relative_tol) result.ok = false;
      }
    }
  }
  return result;
}

}  // namespace urbanembed
