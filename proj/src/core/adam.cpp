#include "urbanembed/core/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace urbanembed {

void Adam::step(ParameterSet& params, const GradientMap& grads) {
  for (const auto& [name, g] : grads) {
    const Parameter& p = params.at(name);
    if (g.rows() != p.value.matrix().rows() || g.cols() != p.value.matrix().cols()) {
      throw std::invalid_argument("Adam: gradient " + shape_string(g) + " for parameter '" + name + "' of shape " +
                                  shape_string(p.value.matrix()));
    }
  }

  ++state_.step;
  const double t = static_cast<double>(state_.step);
  const double correction1 = 1.0 - std::pow(options_.beta1, t);
  const double correction2 = 1.0 - std::pow(options_.beta2, t);

  for (Parameter& p : params.items()) {
    Matrix& value = p.value.matrix();
    auto [m_it, m_new] = state_.first_moment.try_emplace(p.name, Matrix::Zero(value.rows(), value.cols()));
    auto [v_it, v_new] = state_.second_moment.try_emplace(p.name, Matrix::Zero(value.rows(), value.cols()));
    Matrix& m = m_it->second;
    Matrix& v = v_it->second;
    if (m.rows() != value.rows() || m.cols() != value.cols()) {
      throw std::invalid_argument("Adam: moment shape changed for '" + p.name + "'");
    }

    if (p.decay && options_.weight_decay != 0.0) {
      value *= 1.0 - options_.learning_rate * options_.weight_decay;
    }

    const auto g_it = grads.find(p.name);
    if (g_it == grads.end()) {
      m *= options_.beta1;
      v *= options_.beta2;
    } else {
      const Matrix& g = g_it->second;
      m = options_.beta1 * m + (1.0 - options_.beta1) * g;
      v = options_.beta2 * v + (1.0 - options_.beta2) * g.cwiseProduct(g);
    }
    const double lr = options_.learning_rate;
    const double eps = options_.epsilon;
    value.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  }
}

}  // namespace urbanembed
