#pragma once

#include "urbanembed/core/parameters.hpp"

#include <functional>
#include <string>
#include <vector>

namespace urbanembed {

using LossFunction = std::function<double(const ParameterSet&)>;

// Central stencils: (f(x+e) - f(x-e)) / 2e, or the fourth-order five-point
// form, which tolerates a larger step and so loses less to rounding.
enum class Stencil { ThreePoint, FivePoint };

/// Central-difference gradient of `loss` with respect to every parameter
/// (or only those listed in `only`). Throws std::runtime_error if two
/// evaluations at the same point disagree.
GradientMap finite_diff_grad(const LossFunction& loss, const ParameterSet& params, double epsilon = 1e-5,
                             const std::vector<std::string>& only = {}, Stencil stencil = Stencil::ThreePoint);

struct GradientComparison {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;  // over entries compared absolutely
  std::string worst_parameter;
  std::size_t compared = 0;
  bool ok = true;
};

// Relative error per entry, except where |analytic| < small_magnitude, which
// are compared absolutely against absolute_tol.
GradientComparison compare_gradients(const GradientMap& analytic, const GradientMap& numeric,
                                     double relative_tol = 1e-4, double absolute_tol = 1e-6,
                                     double small_magnitude = 1e-8);

}  // namespace urbanembed
